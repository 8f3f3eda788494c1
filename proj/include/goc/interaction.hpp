#ifndef GOC_INTERACTION_HPP_
#define GOC_INTERACTION_HPP_

// Interaction function of the quadratic contour term, the kernels that appear
// when that term is expanded about a circle, and their Fourier integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"

namespace goc {

//! Range d and falloff half-width epsilon of the interaction function, pixels.
struct InteractionParams {
  double d = 1.0;
  double epsilon = 1.0;

  void validate() const {
    if (!(d > 0.0) || !(epsilon > 0.0) || !(epsilon <= d)) {
      std::ostringstream ss;
      ss << "invalid interaction parameters: need d > 0 and 0 < epsilon <= d, got d=" << d
         << " epsilon=" << epsilon;
      throw std::invalid_argument(ss.str());
    }
  }

  double support() const { return d + epsilon; }
};

//! Phi(z): 1 below d - eps, 0 from d + eps on, C^1 sinusoidal ramp between.
inline double phi(double z, InteractionParams const& ip) {
  if (z < ip.d - ip.epsilon) return 1.0;
  if (z >= ip.d + ip.epsilon) return 0.0;
  double const u = (z - ip.d) / ip.epsilon;
  return 0.5 * (1.0 - u - std::sin(kPi * u) / kPi);
}

inline double phi_prime(double z, InteractionParams const& ip) {
  if (z < ip.d - ip.epsilon || z >= ip.d + ip.epsilon) return 0.0;
  double const u = (z - ip.d) / ip.epsilon;
  return -0.5 / ip.epsilon * (1.0 + std::cos(kPi * u));
}

inline double phi_double_prime(double z, InteractionParams const& ip) {
  if (z < ip.d - ip.epsilon || z >= ip.d + ip.epsilon) return 0.0;
  double const u = (z - ip.d) / ip.epsilon;
  return 0.5 * kPi / (ip.epsilon * ip.epsilon) * std::sin(kPi * u);
}

//! Kernels of the second-order expansion of the quadratic term about a circle
//! of radius r0, as functions of the angular separation p = t' - t.
//! f00, f10, f20, f21, f24 are even in p; f11, f22, f23 are odd.
struct KernelValues {
  double f00 = 0.0;
  double f10 = 0.0;
  double f11 = 0.0;
  double f20 = 0.0;
  double f21 = 0.0;
  double f22 = 0.0;
  double f23 = 0.0;
  double f24 = 0.0;
};

inline KernelValues kernels(double p, double r0, InteractionParams const& ip) {
  double const s = std::abs(std::sin(0.5 * p));
  double const x0 = 2.0 * r0 * s;
  double const c = std::cos(p);
  double const sn = std::sin(p);
  double const f = phi(x0, ip);
  double const f1 = phi_prime(x0, ip);
  double const f2 = phi_double_prime(x0, ip);

  // cos^2(p/2)/|sin(p/2)| diverges at p = 0, but Phi'(X0) vanishes there at
  // least as fast as X0^2, so the product tends to 0.
  double a_f1 = 0.0;
  if (s > 0.0) {
    double const ch = std::cos(0.5 * p);
    a_f1 = ch * ch / s * f1;
  }

  KernelValues kv;
  kv.f00 = r0 * r0 * c * f;
  kv.f10 = r0 * c * (f + r0 * s * f1);
  kv.f11 = r0 * sn * f;
  kv.f20 = r0 * c * (0.25 * a_f1 + 0.5 * r0 * s * s * f2 + s * f1);
  kv.f21 = c * (f + 2.0 * r0 * s * f1 - 0.5 * r0 * a_f1 + r0 * r0 * s * s * f2);
  kv.f22 = r0 * s * sn * f1;
  kv.f23 = sn * (f + r0 * s * f1);
  kv.f24 = c * f;
  return kv;
}

//! G_ij = integral over p in [-pi, pi] of exp(-i r0 k p (1 - delta_j0)) F_ij(p).
struct GIntegrals {
  double g00 = 0.0;
  double g10 = 0.0;
  double g20 = 0.0;
  std::complex<double> g21;
  std::complex<double> g23;
  std::complex<double> g24;

  //! 2 G20 + G21 - 2 i r0 k G23 + r0^2 k^2 G24, the bracket multiplying
  //! -2 pi beta in e2. Real up to quadrature error.
  std::complex<double> second_order_bracket(double k, double r0) const {
    using namespace std::complex_literals;
    double const rk = r0 * k;
    return 2.0 * g20 + g21 - 2.0i * rk * g23 + rk * rk * g24;
  }
};

struct QuadratureOptions {
  //! Accuracy every integral must reach; QuadratureNotConverged otherwise.
  double abs_tol = 1e-8;
  //! Absolute error the adaptive refinement aims for over [-pi, pi].
  double target = 1e-11;
  unsigned max_depth = 24;
};

//! Panel boundaries of [-pi, pi]: the endpoints, p = 0, and the angles where
//! X0 = 2 r0 |sin(p/2)| crosses d - eps or d + eps (Phi is only C^1 there).
inline std::vector<double> quadrature_breakpoints(double r0, InteractionParams const& ip) {
  std::vector<double> pts{-kPi, 0.0, kPi};
  for (double z : {ip.d - ip.epsilon, ip.d + ip.epsilon}) {
    double const ratio = z / (2.0 * r0);
    if (ratio > 0.0 && ratio < 1.0) {
      double const p = 2.0 * std::asin(ratio);
      pts.push_back(p);
      pts.push_back(-p);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

namespace detail {

template <std::size_t N>
using Vals = std::array<double, N>;

// One 7/15-point Gauss-Kronrod pair on [a, b] for an array-valued integrand.
// Returns the Kronrod estimate and the largest |Kronrod - Gauss| over components.
template <std::size_t N, typename F>
std::pair<Vals<N>, double> gk15(F const& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  auto const& x = K::abscissa();
  auto const& wk = K::weights();
  auto const& wg = G::weights();
  double const c = 0.5 * (a + b);
  double const h = 0.5 * (b - a);
  Vals<N> kr{};
  Vals<N> ga{};
  Vals<N> const f0 = f(c);
  for (std::size_t j = 0; j < N; ++j) {
    kr[j] = f0[j] * wk[0];
    ga[j] = f0[j] * wg[0];
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    Vals<N> const fp = f(c + h * x[i]);
    Vals<N> const fm = f(c - h * x[i]);
    for (std::size_t j = 0; j < N; ++j) {
      double const s = fp[j] + fm[j];
      kr[j] += s * wk[i];
      // Gauss nodes are the even-indexed Kronrod nodes.
      if (i % 2 == 0) ga[j] += s * wg[i / 2];
    }
  }
  double err = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    kr[j] *= h;
    err = std::max(err, std::abs(kr[j] - ga[j] * h));
  }
  return {kr, err};
}

template <std::size_t N, typename F>
void gk_adaptive(F const& f, double a, double b, double tol, unsigned depth, Vals<N>& sum,
                 double& err) {
  auto const [v, e] = gk15<N>(f, a, b);
  if (e <= tol || depth == 0) {
    for (std::size_t j = 0; j < N; ++j) sum[j] += v[j];
    err += e;
    return;
  }
  double const m = 0.5 * (a + b);
  gk_adaptive<N>(f, a, m, 0.5 * tol, depth - 1, sum, err);
  gk_adaptive<N>(f, m, b, 0.5 * tol, depth - 1, sum, err);
}

//! Integrates every component of f over the panels, each to absolute error
//! opts.abs_tol, refining towards opts.target.
template <std::size_t N, typename F>
Vals<N> integrate_panels(F const& f, std::vector<double> const& pts, QuadratureOptions const& opts,
                         char const* what) {
  Vals<N> sum{};
  double err = 0.0;
  double const span = pts.back() - pts.front();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double const tol = opts.target * (pts[i + 1] - pts[i]) / span;
    gk_adaptive<N>(f, pts[i], pts[i + 1], tol, opts.max_depth, sum, err);
  }
  if (!(err <= opts.abs_tol)) {
    std::ostringstream ss;
    ss << "quadrature for " << what << " did not reach tolerance " << opts.abs_tol
       << " (error estimate " << err << ")";
    throw QuadratureNotConverged(ss.str());
  }
  return sum;
}

}  // namespace detail

//! G00(r0), the k-independent integral giving the circle's quadratic energy.
inline double g00(double r0, InteractionParams const& ip, QuadratureOptions const& opts = {}) {
  auto const pts = quadrature_breakpoints(r0, ip);
  auto f = [&](double p) { return detail::Vals<1>{kernels(p, r0, ip).f00}; };
  return detail::integrate_panels<1>(f, pts, opts, "G00")[0];
}

//! G10(r0) = (1/2) dG00/dr0.
inline double g10(double r0, InteractionParams const& ip, QuadratureOptions const& opts = {}) {
  auto const pts = quadrature_breakpoints(r0, ip);
  auto f = [&](double p) { return detail::Vals<1>{kernels(p, r0, ip).f10}; };
  return detail::integrate_panels<1>(f, pts, opts, "G10")[0];
}

inline GIntegrals g_integrals(double k, double r0, InteractionParams const& ip,
                              QuadratureOptions const& opts = {}) {
  if (!(r0 > 0.0)) throw std::invalid_argument("g_integrals: r0 must be positive");
  ip.validate();
  auto const pts = quadrature_breakpoints(r0, ip);
  double const w = r0 * k;
  auto f = [&](double p) {
    auto const kv = kernels(p, r0, ip);
    double const c = std::cos(w * p);
    double const s = -std::sin(w * p);
    return detail::Vals<9>{kv.f00,     kv.f10,     kv.f20,     c * kv.f21, s * kv.f21,
                           c * kv.f23, s * kv.f23, c * kv.f24, s * kv.f24};
  };
  auto const v = detail::integrate_panels<9>(f, pts, opts, "G");
  GIntegrals g;
  g.g00 = v[0];
  g.g10 = v[1];
  g.g20 = v[2];
  g.g21 = {v[3], v[4]};
  g.g23 = {v[5], v[6]};
  g.g24 = {v[7], v[8]};
  return g;
}

}  // namespace goc

#endif  // GOC_INTERACTION_HPP_
