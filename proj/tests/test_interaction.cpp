#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "goc/interaction.hpp"

namespace {

using goc::InteractionParams;
using goc::kPi;

// Plain trapezoid rule over [-pi, pi] of a periodic integrand. Kernels are
// continuous, so the rule converges; p = 0 is sampled here, unlike in the
// library, which exercises the limit value of the A(p) product.
template <typename F>
double trapezoid(F const& f, long n) {
  double const h = 2.0 * kPi / static_cast<double>(n);
  double s = 0.0;
  for (long i = 0; i < n; ++i) s += f(-kPi + h * static_cast<double>(i));
  return s * h;
}

TEST(Phi, BranchValues) {
  InteractionParams const ip{1.0, 1.0};
  EXPECT_DOUBLE_EQ(goc::phi(0.0, ip), 1.0);
  EXPECT_DOUBLE_EQ(goc::phi(1.0, ip), 0.5);
  EXPECT_DOUBLE_EQ(goc::phi(2.0, ip), 0.0);
  EXPECT_DOUBLE_EQ(goc::phi(5.0, ip), 0.0);

  InteractionParams const wide{3.0, 1.5};
  EXPECT_DOUBLE_EQ(goc::phi(3.0, wide), 0.5);
  EXPECT_DOUBLE_EQ(goc::phi(1.0, wide), 1.0);
  EXPECT_DOUBLE_EQ(goc::phi(4.5, wide), 0.0);
}

TEST(Phi, Derivatives) {
  InteractionParams const ip{2.0, 0.5};
  EXPECT_DOUBLE_EQ(goc::phi_prime(2.0, ip), -1.0 / 0.5);
  EXPECT_DOUBLE_EQ(goc::phi_prime(2.5, ip), 0.0);
  EXPECT_NEAR(goc::phi_prime(1.5, ip), 0.0, 1e-15);
  EXPECT_NEAR(goc::phi_double_prime(2.0, ip), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(goc::phi_prime(0.3, ip), 0.0);
}

TEST(Phi, MonotoneAndContinuous) {
  InteractionParams const ip{1.3, 0.7};
  double prev = goc::phi(0.0, ip);
  for (int i = 1; i <= 4000; ++i) {
    double const z = 3.0 * i / 4000.0;
    double const v = goc::phi(z, ip);
    EXPECT_LE(v, prev + 1e-15);
    EXPECT_LE(std::abs(v - prev), 3.0 / 4000.0 / 0.7 + 1e-12);
    prev = v;
  }
}

TEST(Phi, AnalyticDerivativesMatchFiniteDifferences) {
  for (InteractionParams ip : {InteractionParams{1.0, 1.0}, InteractionParams{8.0, 8.0},
                               InteractionParams{2.0, 0.5}}) {
    double const lo = ip.d - ip.epsilon;
    double const hi = ip.d + ip.epsilon;
    for (int i = 1; i < 50; ++i) {
      double const z = lo + (hi - lo) * i / 50.0;
      double const h = 1e-5 * ip.epsilon;
      double const fd1 = (goc::phi(z + h, ip) - goc::phi(z - h, ip)) / (2.0 * h);
      double const fd2 = (goc::phi_prime(z + h, ip) - goc::phi_prime(z - h, ip)) / (2.0 * h);
      double const a1 = goc::phi_prime(z, ip);
      double const a2 = goc::phi_double_prime(z, ip);
      EXPECT_LE(std::abs(fd1 - a1), 1e-6 * std::abs(a1) + 1e-9) << "z=" << z;
      EXPECT_LE(std::abs(fd2 - a2), 1e-6 * std::abs(a2) + 1e-7 / (ip.epsilon * ip.epsilon))
          << "z=" << z;
    }
  }
}

TEST(Phi, InvalidParamsRejected) {
  EXPECT_THROW((InteractionParams{1.0, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((InteractionParams{0.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((InteractionParams{1.0, 1.0}.validate()));
}

TEST(Kernels, AtZeroSeparation) {
  InteractionParams const ip{1.0, 1.0};
  for (double r0 : {0.5, 1.0, 7.0}) {
    auto const k = goc::kernels(0.0, r0, ip);
    EXPECT_DOUBLE_EQ(k.f00, r0 * r0 * goc::phi(0.0, ip));
    EXPECT_DOUBLE_EQ(k.f24, 1.0);
    EXPECT_DOUBLE_EQ(k.f11, 0.0);
    EXPECT_TRUE(std::isfinite(k.f20));
    EXPECT_TRUE(std::isfinite(k.f21));
  }
}

TEST(Kernels, Parity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(-kPi, kPi);
  InteractionParams const ip{1.0, 1.0};
  for (int i = 0; i < 64; ++i) {
    double const p = up(rng);
    for (double r0 : {0.7, 1.0, 3.0}) {
      auto const a = goc::kernels(p, r0, ip);
      auto const b = goc::kernels(-p, r0, ip);
      EXPECT_NEAR(a.f00, b.f00, 1e-12);
      EXPECT_NEAR(a.f10, b.f10, 1e-12);
      EXPECT_NEAR(a.f20, b.f20, 1e-12);
      EXPECT_NEAR(a.f21, b.f21, 1e-12);
      EXPECT_NEAR(a.f24, b.f24, 1e-12);
      EXPECT_NEAR(a.f11, -b.f11, 1e-12);
      EXPECT_NEAR(a.f22, -b.f22, 1e-12);
      EXPECT_NEAR(a.f23, -b.f23, 1e-12);
    }
  }
}

// Independent evaluation of the F20/F21 brackets with Phi' and Phi'' replaced
// by finite differences of Phi and A(p) written out from its definition.
struct FdKernel {
  InteractionParams ip;
  double d1(double z) const {
    double const h = 1e-6;
    return (goc::phi(z + h, ip) - goc::phi(z - h, ip)) / (2 * h);
  }
  double d2(double z) const {
    double const h = 1e-4;
    return (goc::phi(z + h, ip) - 2 * goc::phi(z, ip) + goc::phi(z - h, ip)) / (h * h);
  }
  double f20(double p, double r0) const {
    double const s = std::abs(std::sin(p / 2));
    double const x = 2 * r0 * s;
    double const a = std::pow(std::cos(p / 2), 2) / s;
    return r0 * std::cos(p) * (a * d1(x) / 4 + r0 * s * s * d2(x) / 2 + s * d1(x));
  }
  double f21(double p, double r0) const {
    double const s = std::abs(std::sin(p / 2));
    double const x = 2 * r0 * s;
    double const a = std::pow(std::cos(p / 2), 2) / s;
    return std::cos(p) *
           (goc::phi(x, ip) + 2 * r0 * s * d1(x) - r0 * a * d1(x) / 2 + r0 * r0 * s * s * d2(x));
  }
};

TEST(Kernels, SecondOrderBracketsMatchFiniteDifferenceOracle) {
  InteractionParams const ip{1.0, 1.0};
  FdKernel const o{ip};
  EXPECT_NEAR(goc::kernels(kPi, 1.0, ip).f20, 0.0, 1e-15);
  for (double p : {0.1, 0.37, 0.8, 1.2, 2.0, 2.9, -1.7}) {
    for (double r0 : {0.6, 1.0, 1.5}) {
      auto const k = goc::kernels(p, r0, ip);
      EXPECT_NEAR(k.f20, o.f20(p, r0), 2e-5) << p << " " << r0;
      EXPECT_NEAR(k.f21, o.f21(p, r0), 2e-5) << p << " " << r0;
    }
  }
}

TEST(GIntegrals, G10MatchesDenseTrapezoid) {
  InteractionParams const ip{1.0, 1.0};
  double const ref = trapezoid([&](double p) { return goc::kernels(p, 1.0, ip).f10; }, 1000000);
  EXPECT_NEAR(goc::g10(1.0, ip), ref, 1e-6);
  // Frozen from an independent scipy evaluation of the same integral.
  EXPECT_NEAR(goc::g10(1.0, ip), 1.29661, 1e-5);
}

TEST(GIntegrals, AllIntegralsMatchDenseTrapezoid) {
  InteractionParams const ip{8.0, 8.0};
  double const r0 = 8.0;
  double const k = 3.0 / r0;
  auto const g = goc::g_integrals(k, r0, ip);
  long const n = 400000;
  auto kv = [&](double p) { return goc::kernels(p, r0, ip); };
  EXPECT_NEAR(g.g00, trapezoid([&](double p) { return kv(p).f00; }, n), 1e-6 * std::abs(g.g00));
  EXPECT_NEAR(g.g20, trapezoid([&](double p) { return kv(p).f20; }, n), 1e-6);
  EXPECT_NEAR(g.g21.real(), trapezoid([&](double p) { return std::cos(r0 * k * p) * kv(p).f21; }, n),
              1e-6);
  EXPECT_NEAR(g.g23.imag(),
              trapezoid([&](double p) { return -std::sin(r0 * k * p) * kv(p).f23; }, n), 1e-6);
  EXPECT_NEAR(g.g24.real(), trapezoid([&](double p) { return std::cos(r0 * k * p) * kv(p).f24; }, n),
              1e-6);
}

TEST(GIntegrals, NoInteractionGivesZeroFirstOrderTerms) {
  // With 2 r0 < d - eps every pair of points interacts with Phi = 1, and the
  // integrals of cos p vanish.
  InteractionParams const ip{3.0, 1.0};
  auto const g = goc::g_integrals(0.0, 0.5, ip);
  EXPECT_NEAR(g.g00, 0.0, 1e-12);
  EXPECT_NEAR(g.g10, 0.0, 1e-12);
  EXPECT_NEAR(g.g20, 0.0, 1e-12);
}

TEST(GIntegrals, RealAtZeroWavenumber) {
  InteractionParams const ip{1.0, 1.0};
  auto const g = goc::g_integrals(0.0, 1.0, ip);
  EXPECT_EQ(g.g21.imag(), 0.0);
  EXPECT_EQ(g.g24.imag(), 0.0);
}

TEST(GIntegrals, NegativeWavenumberIsConjugate) {
  InteractionParams const ip{1.0, 1.0};
  for (int m : {1, 2, 5, 17}) {
    double const r0 = 1.0;
    auto const a = goc::g_integrals(m / r0, r0, ip);
    auto const b = goc::g_integrals(-m / r0, r0, ip);
    EXPECT_NEAR(std::abs(a.g21 - std::conj(b.g21)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.g23 - std::conj(b.g23)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.g24 - std::conj(b.g24)), 0.0, 1e-12);
  }
}

TEST(GIntegrals, SecondOrderBracketIsReal) {
  for (InteractionParams ip : {InteractionParams{1.0, 1.0}, InteractionParams{8.0, 8.0}}) {
    for (double r0 : {0.7 * ip.d, ip.d, 2.5 * ip.d}) {
      for (int m : {0, 1, 2, 7, 40, 100}) {
        double const k = m / r0;
        auto const g = goc::g_integrals(k, r0, ip);
        EXPECT_LE(std::abs(g.second_order_bracket(k, r0).imag()), 1e-8);
      }
    }
  }
}

TEST(GIntegrals, Breakpoints) {
  InteractionParams const ip{1.0, 1.0};
  auto const pts = goc::quadrature_breakpoints(1.0, ip);
  // d - eps = 0 adds nothing; d + eps = 2 = 2 r0 sits at +-pi.
  ASSERT_EQ(pts.size(), 3u);
  auto const pts2 = goc::quadrature_breakpoints(4.0, InteractionParams{2.0, 1.0});
  ASSERT_EQ(pts2.size(), 7u);
  EXPECT_NEAR(pts2[4], 2.0 * std::asin(1.0 / 8.0), 1e-15);
}

TEST(GIntegrals, ThrowsWhenToleranceUnreachable) {
  InteractionParams const ip{1.0, 1.0};
  goc::QuadratureOptions q;
  q.abs_tol = 1e-30;
  q.max_depth = 1;
  EXPECT_THROW(goc::g_integrals(50.0, 1.0, ip, q), goc::QuadratureNotConverged);
}

}  // namespace
