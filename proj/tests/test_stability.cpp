#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "goc/stability.hpp"

namespace {

using goc::kPi;
using goc::PriorParams;

PriorParams reference_prior() {
  PriorParams p;
  p.lambda_c = 1.0;
  p.alpha_c = 0.8;
  p.d = 1.0;
  p.epsilon = 1.0;
  p.r0_hat = 1.0;
  p.beta_c = goc::beta_for_minimum(p);
  return p;
}

double dense_g10(double r0, goc::InteractionParams const& ip) {
  long const n = 1000000;
  double const h = 2.0 * kPi / n;
  double s = 0.0;
  for (long i = 0; i < n; ++i) s += goc::kernels(-kPi + h * i, r0, ip).f10;
  return s * h;
}

TEST(E0, PureLengthAndArea) {
  PriorParams p;
  p.lambda_c = 1.0;
  for (double r : {0.5, 1.0, 3.0}) EXPECT_NEAR(goc::e0(r, p), 2.0 * kPi * r, 1e-12);
  p.lambda_c = 0.0;
  p.alpha_c = 1.0;
  EXPECT_NEAR(goc::e0(2.0, p), 4.0 * kPi, 1e-12);
}

TEST(E0, ReferenceMinimumAtTargetRadius) {
  auto const p = reference_prior();
  auto const curve = goc::e0_curve(p, goc::linspace(0.6, 1.6, 1001));
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    if (curve[i].second < curve[i - 1].second && curve[i].second <= curve[i + 1].second) best = i;
  }
  ASSERT_GT(best, 0u);
  EXPECT_NEAR(curve[best].first, 1.0, 0.01);
}

TEST(E1, IsDerivativeOfE0) {
  auto const p = reference_prior();
  for (double r : {0.4, 0.7, 1.0, 1.3, 2.5}) {
    double const h = 1e-5;
    double const fd = (goc::e0(r + h, p) - goc::e0(r - h, p)) / (2 * h);
    EXPECT_NEAR(goc::e1(r, p), fd, 1e-5) << r;
  }
}

TEST(E1, ZeroWithoutInteractionWhenAlphaBalancesLength) {
  PriorParams p;
  p.lambda_c = 2.0;
  p.r0_hat = 4.0;
  p.alpha_c = -p.lambda_c / p.r0_hat;
  EXPECT_NEAR(goc::e1(p.r0_hat, p), 0.0, 1e-12);
}

TEST(E1, VanishesAtTargetWithSolvedBeta) {
  EXPECT_LE(std::abs(goc::e1(1.0, reference_prior())), 1e-9);
}

TEST(E1, SignAgainstDenseOracle) {
  PriorParams p;
  p.lambda_c = 1.0;
  p.alpha_c = 0.8;
  p.beta_c = 1.0;
  double const ref = dense_g10(1.0, p.interaction());
  double const e = goc::e1(1.0, p);
  EXPECT_EQ(e > 0, 1.8 - ref > 0);
  EXPECT_NEAR(e, 2 * kPi * (1.8 - ref), 1e-6);
}

TEST(E2, ClassicalSpectrum) {
  PriorParams p;
  p.lambda_c = 1.5;
  p.r0_hat = 3.0;
  p.alpha_c = -p.lambda_c / p.r0_hat;
  for (int m = 0; m <= 10; ++m) {
    double const expect = 2 * kPi * p.lambda_c * (m * m - 1.0) / p.r0_hat;
    EXPECT_NEAR(goc::e2(m / p.r0_hat, p.r0_hat, p), expect, 1e-12) << m;
  }
}

TEST(E2, TranslationZeroMode) {
  auto const p = reference_prior();
  EXPECT_NEAR(goc::e2(1.0, 1.0, p), 0.0, 1e-6);
  PriorParams q = p;
  q.d = q.epsilon = q.r0_hat = 8.0;
  q.alpha_c = 5.0;
  q.beta_c = goc::beta_for_minimum(q);
  EXPECT_NEAR(goc::e2(1.0 / 8.0, 8.0, q), 0.0, 1e-6);
}

TEST(E2, ReferenceSpectrumNonNegative) {
  auto const p = reference_prior();
  for (int m = 0; m <= 100; ++m) EXPECT_GE(goc::e2(m / 1.0, 1.0, p), -1e-8) << m;
}

TEST(E2, ReferenceFrozenValues) {
  // Frozen from an independent scipy evaluation of the same formulas.
  auto const p = reference_prior();
  double const ref[] = {16.093, 0.0, 30.826, 101.304, 145.542, 195.081, 260.520, 340.514};
  for (int m = 0; m < 8; ++m) EXPECT_NEAR(goc::e2(m, 1.0, p), ref[m], 2e-3) << m;
}

TEST(E2, ZeroWavenumberIsDerivativeOfE1) {
  auto const p = reference_prior();
  for (double r : {0.5, 1.0, 1.7}) {
    double const h = 1e-5;
    double const fd = (goc::e1(r + h, p) - goc::e1(r - h, p)) / (2 * h);
    EXPECT_NEAR(goc::e2(0.0, r, p), fd, 1e-5) << r;
  }
}

TEST(E2, EvenInWavenumber) {
  auto const p = reference_prior();
  for (int m : {1, 2, 3, 9, 30}) EXPECT_NEAR(goc::e2(m, 1.0, p), goc::e2(-m, 1.0, p), 1e-10);
}

TEST(BetaForMinimum, ReferenceParameters) {
  auto const p = reference_prior();
  EXPECT_NEAR(p.beta_c, 1.39, 0.01);
  EXPECT_NEAR(p.beta_c, 1.388233, 1e-5);
}

TEST(BetaForMinimum, ZeroNumerator) {
  EXPECT_DOUBLE_EQ(goc::beta_for_minimum(1.0, -1.0, 1.0, 1.0, 1.0), 0.0);
}

TEST(BetaForMinimum, PureLengthAgainstDenseOracle) {
  double const ref = 1.0 / dense_g10(1.0, {1.0, 1.0});
  EXPECT_NEAR(goc::beta_for_minimum(1.0, 0.0, 1.0, 1.0, 1.0), ref, 1e-6);
}

TEST(BetaForMinimum, DegenerateWhenTooSmall) {
  EXPECT_THROW(goc::beta_for_minimum(1.0, 1.0, 0.5, 3.0, 1.0), goc::DegenerateG10);
}

TEST(ExtremaScan, NoExtremaWithoutInteraction) {
  auto p = reference_prior();
  auto const rows = goc::extrema_scan(p, {0.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].extrema.empty());
}

TEST(ExtremaScan, ReferenceHasMaximumThenMinimum) {
  auto const p = reference_prior();
  auto const rows = goc::extrema_scan(p, {p.beta_c});
  ASSERT_EQ(rows[0].extrema.size(), 2u);
  EXPECT_EQ(rows[0].extrema[0].kind, goc::ExtremumKind::max);
  EXPECT_EQ(rows[0].extrema[1].kind, goc::ExtremumKind::min);
  EXPECT_NEAR(rows[0].extrema[1].r0, 1.0, 1e-5);
  EXPECT_GT(rows[0].extrema[0].r0, 0.5);
  EXPECT_LT(rows[0].extrema[0].r0, 0.7);
}

TEST(ExtremaScan, FoldStructure) {
  auto const p = reference_prior();
  auto const fold = goc::fold_point(p);
  ASSERT_TRUE(std::isfinite(fold.beta));
  EXPECT_GT(fold.beta, 0.0);
  EXPECT_LT(fold.beta, p.beta_c);
  std::vector<double> betas;
  for (int i = 1; i <= 20; ++i) betas.push_back(fold.beta * (0.5 + 0.1 * i));
  auto const rows = goc::extrema_scan(p, betas);
  double last_min = 0.0;
  for (auto const& row : rows) {
    if (row.beta < fold.beta * 0.999) {
      EXPECT_TRUE(row.extrema.empty()) << row.beta;
    } else if (row.beta > fold.beta * 1.001) {
      ASSERT_EQ(row.extrema.size(), 2u) << row.beta;
      EXPECT_EQ(row.extrema[0].kind, goc::ExtremumKind::max);
      EXPECT_EQ(row.extrema[1].kind, goc::ExtremumKind::min);
      EXPECT_GE(row.extrema[1].r0, fold.r0 - 1e-4);
      EXPECT_GE(row.extrema[1].r0, last_min);
      last_min = row.extrema[1].r0;
    }
  }
}

TEST(Validate, ReferenceValid) {
  auto const rep = goc::validate(reference_prior());
  EXPECT_TRUE(rep.valid) << rep.reason;
  EXPECT_EQ(rep.e2_curve.size(), 101u);
  EXPECT_EQ(rep.extrema.size(), 2u);
}

TEST(Validate, HalvedBetaHasNoExtremum) {
  auto p = reference_prior();
  p.beta_c *= 0.5;
  auto const rep = goc::validate(p);
  EXPECT_FALSE(rep.valid);
  EXPECT_NE(rep.reason.find("no extremum"), std::string::npos) << rep.reason;
}

TEST(Validate, NegativeLambda) {
  auto p = reference_prior();
  p.lambda_c = -1.0;
  auto const rep = goc::validate(p);
  EXPECT_FALSE(rep.valid);
  EXPECT_NE(rep.reason.find("high-frequency instability"), std::string::npos);
}

TEST(Validate, MaximumBranchRejected) {
  // Choose r0_hat on the maximum branch of the reference e0 curve and solve beta for it.
  PriorParams p;
  p.lambda_c = 1.0;
  p.alpha_c = 0.8;
  p.r0_hat = 0.55;
  p.beta_c = goc::beta_for_minimum(p);
  auto const rows = goc::extrema_scan(p, {p.beta_c});
  bool on_max = false;
  for (auto const& e : rows[0].extrema)
    if (std::abs(e.r0 - 0.55) < 1e-4) on_max = e.kind == goc::ExtremumKind::max;
  ASSERT_TRUE(on_max);
  auto const rep = goc::validate(p);
  EXPECT_FALSE(rep.valid);
  EXPECT_NE(rep.reason.find("maximum"), std::string::npos) << rep.reason;
}

TEST(Validate, ScaleCovariance) {
  auto const base = reference_prior();
  bool const v0 = goc::validate(base).valid;
  for (double s : {0.5, 2.0, 10.0}) {
    PriorParams p = base;
    p.r0_hat *= s;
    p.d *= s;
    p.epsilon *= s;
    p.alpha_c /= s;
    p.beta_c = goc::beta_for_minimum(p);
    EXPECT_NEAR(p.beta_c * s, base.beta_c, 1e-8 * base.beta_c);
    goc::ValidateOptions o;
    o.m_max = 30;
    EXPECT_EQ(goc::validate(p, o).valid, v0) << s;
  }
}

TEST(Csv, TwelveSignificantDigits) {
  std::ostringstream os;
  goc::write_curve_csv(os, "r0,e0", {{1.0, 2.0 / 3.0}, {0.5, 12345.678901234567}});
  EXPECT_EQ(os.str(), "r0,e0\n1,0.666666666667\n0.5,12345.6789012\n");
}

}  // namespace
