#include <gtest/gtest.h>

#include <cmath>

#include "goc/contour_oracle.hpp"

namespace {

using goc::kPi;
using goc::OracleScheme;
using goc::PriorParams;

PriorParams reference_prior() {
  PriorParams p;
  p.lambda_c = 1.0;
  p.alpha_c = 0.8;
  p.r0_hat = 1.0;
  p.beta_c = goc::beta_for_minimum(p);
  return p;
}

goc::PolyContour circle(double r, std::size_t n) { return goc::build_contour({r, {}}, n); }

TEST(BuildContour, RegularPolygon) {
  auto const c = circle(2.0, 64);
  ASSERT_EQ(c.size(), 64u);
  for (auto const& v : c.vertices) EXPECT_NEAR(goc::norm(v), 2.0, 1e-14);
  EXPECT_NEAR(c.vertices[0].x, -2.0, 1e-14);
}

TEST(BuildContour, RadiusShift) {
  goc::FourierPerturbation p{1.0, {{0, 0.1}}};
  for (auto const& v : goc::build_contour(p, 32).vertices) EXPECT_NEAR(goc::norm(v), 1.1, 1e-14);
}

TEST(BuildContour, SecondMode) {
  goc::FourierPerturbation p{1.0, {{2, 0.05}}};
  auto const c = goc::build_contour(p, 64);
  double mx = 0.0;
  for (auto const& v : c.vertices) mx = std::max(mx, goc::norm(v));
  EXPECT_NEAR(mx, 1.1, 1e-14);
  // t = 0 is vertex n/2.
  EXPECT_NEAR(c.vertices[32].x, 1.1, 1e-14);
  EXPECT_NEAR(c.vertices[32].y, 0.0, 1e-14);
}

TEST(BuildContour, Errors) {
  EXPECT_THROW(goc::build_contour({1.0, {{0, -1.5}}}, 32), goc::NonPositiveRadius);
  EXPECT_THROW(goc::build_contour({1.0, {}}, 8), std::invalid_argument);
  EXPECT_THROW(goc::build_contour({1.0, {{0, {0.1, 0.1}}}}, 32), std::invalid_argument);
}

class BothSchemes : public ::testing::TestWithParam<OracleScheme> {};

TEST_P(BothSchemes, CircumferenceAndArea) {
  auto const c = circle(1.0, 4096);
  PriorParams p;
  p.lambda_c = 1.0;
  EXPECT_NEAR(goc::energy(c, p, GetParam()).total, 2 * kPi, 1e-5);
  p.lambda_c = 0.0;
  p.alpha_c = 1.0;
  EXPECT_NEAR(goc::energy(c, p, GetParam()).total, kPi, 1e-5);
}

TEST_P(BothSchemes, MatchesAnalyticCircleEnergy) {
  auto const p = reference_prior();
  double const ref = goc::e0(1.0, p);
  double const e = goc::energy(circle(1.0, 4096), p, GetParam()).total;
  EXPECT_NEAR(e, ref, 1e-4 * std::abs(ref));
}

TEST_P(BothSchemes, EuclideanInvariance) {
  auto const p = reference_prior();
  goc::FourierPerturbation fp{1.0, {{0, 0.01}, {2, {0.02, -0.01}}, {5, {0.0, 0.01}}}};
  auto const c = goc::build_contour(fp, 512);
  auto moved = c;
  double const th = 0.7;
  for (auto& v : moved.vertices) {
    v = goc::Vec2{std::cos(th) * v.x - std::sin(th) * v.y, std::sin(th) * v.x + std::cos(th) * v.y} +
        goc::Vec2{3.25, -1.5};
  }
  double const a = goc::energy(c, p, GetParam()).total;
  double const b = goc::energy(moved, p, GetParam()).total;
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST_P(BothSchemes, RefinementConvergence) {
  auto const p = reference_prior();
  goc::FourierPerturbation fp{1.0, {{0, 0.02}, {3, {0.01, 0.005}}}};
  double const e1 = goc::energy(goc::build_contour(fp, 128), p, GetParam()).total;
  double const e2 = goc::energy(goc::build_contour(fp, 256), p, GetParam()).total;
  double const e3 = goc::energy(goc::build_contour(fp, 512), p, GetParam()).total;
  EXPECT_LE(std::abs(e3 - e2) * 4.0, std::abs(e2 - e1) * 1.05);
}

INSTANTIATE_TEST_SUITE_P(Oracle, BothSchemes,
                         ::testing::Values(OracleScheme::fourth_order, OracleScheme::polygon));

TEST(Energy, PairTermSymmetric) {
  auto const p = reference_prior();
  goc::FourierPerturbation fp{1.0, {{2, {0.02, -0.01}}, {7, {0.0, 0.01}}}};
  auto const c = goc::build_contour(fp, 256);
  auto const tau = goc::detail::oracle_tangents(c, OracleScheme::fourth_order);
  double const cut = 4.0;
  for (std::size_t i = 0; i < 256; i += 7) {
    for (std::size_t j = 0; j < 256; j += 5) {
      EXPECT_EQ(goc::detail::pair_term(c.vertices, tau, i, j, p.interaction(), cut),
                goc::detail::pair_term(c.vertices, tau, j, i, p.interaction(), cut));
    }
  }
}

TEST(Energy, DeltaMatchesDifference) {
  auto const p = reference_prior();
  goc::FourierPerturbation fp{1.0, {{0, 0.01}, {4, {0.01, 0.02}}}};
  auto const a = goc::build_contour(fp, 512);
  auto const b = circle(1.0, 512);
  double const d = goc::energy_delta(a, b, p).total;
  double const ref = goc::energy(a, p).total - goc::energy(b, p).total;
  EXPECT_NEAR(d, ref, 1e-11);
}

TEST(Taylor, ZeroScale) {
  auto const p = reference_prior();
  goc::FourierPerturbation fp{1.0, {{0, 0.01}, {3, {0.01, 0.0}}}};
  auto const r = goc::taylor_residual(fp, 0.0, p, 1024);
  EXPECT_EQ(r.incremental, 0.0);
  EXPECT_NEAR(r.raw, 0.0, 1e-8);
}

TEST(Taylor, RadiusShiftExactWithoutInteraction) {
  PriorParams p;
  p.lambda_c = 1.3;
  p.alpha_c = 0.4;
  goc::FourierPerturbation fp{2.0, {{0, 0.3}}};
  for (auto scheme : {OracleScheme::fourth_order, OracleScheme::polygon}) {
    auto const r = goc::taylor_residual(fp, 1.0, p, 4096, scheme);
    // Only the discretisation of the circle remains: length and area are
    // exactly quadratic in a pure radius shift.
    double const disc = std::abs(goc::energy(circle(2.3, 4096), p, scheme).total -
                                 (2 * kPi * p.lambda_c * 2.3 + kPi * p.alpha_c * 2.3 * 2.3));
    EXPECT_NEAR(r.raw, 0.0, disc + 1e-12);
  }
}

TEST(Taylor, CubicOrder) {
  auto const p = reference_prior();
  boost::random::mt19937_64 rng(3);
  goc::TaylorModel const model(p, 1.0, 8);
  std::vector<double> const scales{0.04, 0.02, 0.01};
  for (int trial = 0; trial < 2; ++trial) {
    auto const fp = goc::random_perturbation(rng, 1.0, 8, 0.02);
    EXPECT_NEAR(fp.sup_amplitude(), 0.02, 1e-12);
    std::vector<double> res;
    for (double s : scales) res.push_back(goc::taylor_residual(fp, s, p, model, 4096).incremental);
    EXPECT_GE(goc::loglog_slope(scales, res), 2.9);
  }
}

TEST(Taylor, LogLogSlope) {
  EXPECT_NEAR(goc::loglog_slope({1, 2, 4}, {3, 24, 192}), 3.0, 1e-12);
  EXPECT_NEAR(goc::loglog_slope({1, 2, 4}, {-3, -24, -192}), 3.0, 1e-12);
}

}  // namespace
