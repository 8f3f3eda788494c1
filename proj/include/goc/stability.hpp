#ifndef GOC_STABILITY_HPP_
#define GOC_STABILITY_HPP_

// Energy of a circle and of its radial perturbations to second order, the
// parameter constraint that makes a chosen radius an extremum, and the
// checks that it is a stable minimum.

#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"
#include "goc/interaction.hpp"

namespace goc {

struct PriorParams {
  double lambda_c = 1.0;
  double alpha_c = 0.0;
  double beta_c = 0.0;
  double d = 1.0;
  double epsilon = 1.0;
  double r0_hat = 1.0;

  InteractionParams interaction() const { return {d, epsilon}; }
};

enum class ExtremumKind { min, max };

inline char const* to_string(ExtremumKind k) { return k == ExtremumKind::min ? "min" : "max"; }

struct Extremum {
  double r0 = 0.0;
  ExtremumKind kind = ExtremumKind::min;
};

struct StabilityReport {
  double beta_solved = 0.0;
  std::vector<std::pair<double, double>> e0_curve;
  std::vector<std::pair<double, double>> e2_curve;
  std::vector<Extremum> extrema;
  bool valid = false;
  std::string reason;
};

//! Energy of a circle of radius r0.
inline double e0(double r0, PriorParams const& p, QuadratureOptions const& q = {}) {
  if (!(r0 > 0.0)) throw std::invalid_argument("e0: r0 must be positive");
  double const g = p.beta_c == 0.0 ? 0.0 : g00(r0, p.interaction(), q);
  return kTwoPi * p.lambda_c * r0 + kPi * p.alpha_c * r0 * r0 - kPi * p.beta_c * g;
}

//! Coefficient of a0 in the expansion; equals de0/dr0.
inline double e1(double r0, PriorParams const& p, QuadratureOptions const& q = {}) {
  if (!(r0 > 0.0)) throw std::invalid_argument("e1: r0 must be positive");
  double const g = p.beta_c == 0.0 ? 0.0 : g10(r0, p.interaction(), q);
  return kTwoPi * (p.lambda_c + p.alpha_c * r0 - p.beta_c * g);
}

//! Largest |imaginary part| of the e2 bracket tolerated before it is discarded.
inline constexpr double kE2ImagTol = 1e-8;

//! Coefficient of |a_k|^2 in the expansion, at wavenumber k = m / r0.
inline double e2(double k, double r0, PriorParams const& p, QuadratureOptions const& q = {}) {
  if (!(r0 > 0.0)) throw std::invalid_argument("e2: r0 must be positive");
  double bracket = 0.0;
  if (p.beta_c != 0.0) {
    auto const ip = p.interaction();
    auto const g = g_integrals(k, r0, ip, q);
    auto const b = g.second_order_bracket(k, r0);
    if (std::abs(b.imag()) > kE2ImagTol) {
      std::ostringstream ss;
      ss << "e2 bracket has imaginary part " << b.imag() << " at k=" << k << " r0=" << r0;
      throw ComplexResidue(ss.str());
    }
    bracket = b.real();
  }
  return kTwoPi * (p.lambda_c * r0 * k * k + p.alpha_c - p.beta_c * bracket);
}

//! Threshold on |G10| below which the circle cannot interact with itself.
inline constexpr double kG10Floor = 1e-12;

//! beta making r0_hat an extremum of e0: (lambda + alpha r0_hat) / G10(r0_hat).
inline double beta_for_minimum(double lambda_c, double alpha_c, double r0_hat, double d,
                               double epsilon, QuadratureOptions const& q = {}) {
  InteractionParams const ip{d, epsilon};
  ip.validate();
  if (!(r0_hat > 0.0)) throw std::invalid_argument("beta_for_minimum: r0_hat must be positive");
  double const g = g10(r0_hat, ip, q);
  if (std::abs(g) < kG10Floor) {
    std::ostringstream ss;
    ss << "G10(" << r0_hat << ") = " << g << " is zero: the circle is too small to interact";
    throw DegenerateG10(ss.str());
  }
  return (lambda_c + alpha_c * r0_hat) / g;
}

inline double beta_for_minimum(PriorParams const& p, QuadratureOptions const& q = {}) {
  return beta_for_minimum(p.lambda_c, p.alpha_c, p.r0_hat, p.d, p.epsilon, q);
}

//! Evenly spaced grid [lo, hi] with n points.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

//! Radius window of the extrema search. Beyond 2 r0 > d + eps the interaction
//! term is linear in r0, so every extremum lies well inside.
inline std::vector<double> default_r_grid(InteractionParams const& ip, std::size_t n = 512) {
  return linspace(0.05 * ip.d, 4.0 * (ip.d + ip.epsilon), n);
}

struct ExtremaAtBeta {
  double beta = 0.0;
  std::vector<Extremum> extrema;
};

//! Bisection tolerance on r0 when locating the zeros of e1.
inline constexpr double kExtremumTol = 1e-6;

//! Zeros of e1 on the grid at each beta, classified by the direction of the
//! sign change: - to + is a minimum of e0, + to - a maximum.
inline std::vector<ExtremaAtBeta> extrema_scan(PriorParams const& p,
                                               std::vector<double> const& betas,
                                               std::vector<double> const& r_grid,
                                               QuadratureOptions const& q = {}) {
  auto const ip = p.interaction();
  ip.validate();
  std::vector<double> g(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i) g[i] = g10(r_grid[i], ip, q);

  std::vector<ExtremaAtBeta> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    auto f = [&](double r) { return p.lambda_c + p.alpha_c * r - beta * g10(r, ip, q); };
    ExtremaAtBeta row{beta, {}};
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i) {
      double const a = p.lambda_c + p.alpha_c * r_grid[i] - beta * g[i];
      double const b = p.lambda_c + p.alpha_c * r_grid[i + 1] - beta * g[i + 1];
      if ((a < 0.0) == (b < 0.0)) continue;
      auto const [lo, hi] = boost::math::tools::bisect(
          f, r_grid[i], r_grid[i + 1], [](double x, double y) { return std::abs(y - x) < kExtremumTol; });
      row.extrema.push_back({0.5 * (lo + hi), a < 0.0 ? ExtremumKind::min : ExtremumKind::max});
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<ExtremaAtBeta> extrema_scan(PriorParams const& p,
                                               std::vector<double> const& betas,
                                               QuadratureOptions const& q = {}) {
  return extrema_scan(p, betas, default_r_grid(p.interaction()), q);
}

struct FoldPoint {
  double beta = 0.0;
  double r0 = 0.0;
};

//! Where the maximum and minimum branches merge: the smallest beta for which
//! lambda + alpha r - beta G10(r) has a zero, i.e. min over r of
//! (lambda + alpha r) / G10(r).
inline FoldPoint fold_point(PriorParams const& p, std::vector<double> const& r_grid,
                            QuadratureOptions const& q = {}) {
  auto const ip = p.interaction();
  auto h = [&](double r) {
    double const g = g10(r, ip, q);
    return g > kG10Floor ? (p.lambda_c + p.alpha_c * r) / g : std::numeric_limits<double>::infinity();
  };
  std::size_t best = 0;
  double best_h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    double const v = h(r_grid[i]);
    if (v < best_h) {
      best_h = v;
      best = i;
    }
  }
  if (!std::isfinite(best_h)) return {best_h, 0.0};
  double const lo = r_grid[best == 0 ? 0 : best - 1];
  double const hi = r_grid[best + 1 < r_grid.size() ? best + 1 : best];
  auto const [r, v] = boost::math::tools::brent_find_minima(h, lo, hi, 40);
  return v < best_h ? FoldPoint{v, r} : FoldPoint{best_h, r_grid[best]};
}

inline FoldPoint fold_point(PriorParams const& p, QuadratureOptions const& q = {}) {
  return fold_point(p, default_r_grid(p.interaction()), q);
}

inline std::vector<std::pair<double, double>> e0_curve(PriorParams const& p,
                                                       std::vector<double> const& radii,
                                                       QuadratureOptions const& q = {}) {
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double r : radii) out.emplace_back(r, e0(r, p, q));
  return out;
}

//! e2 at k = m / r0 for m = 0..m_max.
inline std::vector<std::pair<double, double>> e2_curve(PriorParams const& p, double r0, int m_max,
                                                       QuadratureOptions const& q = {}) {
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(m_max + 1));
  for (int m = 0; m <= m_max; ++m) {
    double const k = m / r0;
    out.emplace_back(k, e2(k, r0, p, q));
  }
  return out;
}

struct ValidateOptions {
  int m_max = 100;
  double extremum_rel_tol = 1e-6;
  double stability_abs_tol = 1e-8;
  double derivative_step = 1e-4;
  std::size_t e0_points = 200;
  QuadratureOptions quadrature;
};

//! Checks that the circle of radius r0_hat is a stable local minimum of the
//! prior energy under the given (complete) parameters.
inline StabilityReport validate(PriorParams const& p, ValidateOptions const& o = {}) {
  StabilityReport rep;
  rep.beta_solved = p.beta_c;
  auto const& q = o.quadrature;
  try {
    p.interaction().validate();
  } catch (std::invalid_argument const& e) {
    rep.reason = e.what();
    return rep;
  }
  if (!(p.r0_hat > 0.0)) {
    rep.reason = "r0_hat must be positive";
    return rep;
  }
  if (!(p.lambda_c > 0.0)) {
    rep.reason = "high-frequency instability (lambda_c <= 0)";
    return rep;
  }

  double const rh = p.r0_hat;
  rep.e0_curve = e0_curve(p, linspace(0.05 * rh, 3.0 * rh, o.e0_points), q);
  auto const grid = default_r_grid(p.interaction());
  rep.extrema = extrema_scan(p, {p.beta_c}, grid, q).front().extrema;

  double const v0 = e0(rh, p, q);
  double const v1 = e1(rh, p, q);
  if (std::abs(v1) > o.extremum_rel_tol * std::abs(v0)) {
    std::ostringstream ss;
    ss << "no extremum at r0_hat (e1 = " << v1 << ")";
    rep.reason = ss.str();
    return rep;
  }
  double const h = o.derivative_step * rh;
  double const de1 = (e1(rh + h, p, q) - e1(rh - h, p, q)) / (2.0 * h);
  if (!(de1 > 0.0)) {
    rep.reason = "extremum at r0_hat is a maximum, not a minimum";
    return rep;
  }
  rep.e2_curve = e2_curve(p, rh, o.m_max, q);
  for (std::size_t m = 0; m < rep.e2_curve.size(); ++m) {
    if (rep.e2_curve[m].second < -o.stability_abs_tol) {
      std::ostringstream ss;
      ss << "unstable perturbation mode m=" << m << " (e2 = " << rep.e2_curve[m].second << ")";
      rep.reason = ss.str();
      return rep;
    }
  }
  rep.valid = true;
  rep.reason = "stable minimum at r0_hat";
  return rep;
}

//! Writes a two-column CSV with the given header and 12 significant digits.
inline void write_curve_csv(std::ostream& os, std::string const& header,
                            std::vector<std::pair<double, double>> const& curve) {
  os << header << '\n';
  auto const old = os.precision(12);
  for (auto const& [x, y] : curve) os << x << ',' << y << '\n';
  os.precision(old);
}

}  // namespace goc

#endif  // GOC_STABILITY_HPP_
