#ifndef GOC_CONTOUR_ORACLE_HPP_
#define GOC_CONTOUR_ORACLE_HPP_

// Brute-force prior energy of explicit closed polygons, used to check the
// analytic expansion about a circle.

#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"
#include "goc/interaction.hpp"
#include "goc/stability.hpp"

namespace goc {

//! Closed polygon; vertex i is joined to vertex i+1 and the last to the first.
//! Vertices are samples of a curve at equally spaced parameter values
//! t_i = -pi + 2 pi i / n, counterclockwise.
struct PolyContour {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }

  void validate() const {
    if (vertices.size() < 16) throw std::invalid_argument("PolyContour needs at least 16 vertices");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i] == vertices[(i + 1) % vertices.size()])
        throw std::invalid_argument("PolyContour has repeated consecutive vertices");
    }
  }
};

//! Radial perturbation r(t) = r0 + sum_m a_m e^{imt}, with a_{-m} = conj(a_m).
//! Only m >= 0 is stored; a_0 must be real.
struct FourierPerturbation {
  double r0 = 1.0;
  std::map<int, std::complex<double>> coeffs;

  double radius(double t) const {
    double r = r0;
    for (auto const& [m, a] : coeffs) {
      if (m == 0)
        r += a.real();
      else
        r += 2.0 * (a * std::exp(std::complex<double>(0.0, m * t))).real();
    }
    return r;
  }

  //! sup over t of |r(t) - r0|, sampled.
  double sup_amplitude(std::size_t samples = 4096) const {
    double mx = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      double const t = -kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(samples);
      mx = std::max(mx, std::abs(radius(t) - r0));
    }
    return mx;
  }

  FourierPerturbation scaled(double s) const {
    FourierPerturbation out{r0, {}};
    for (auto const& [m, a] : coeffs) out.coeffs[m] = s * a;
    return out;
  }

  void validate() const {
    for (auto const& [m, a] : coeffs) {
      if (m < 0) throw std::invalid_argument("FourierPerturbation stores modes m >= 0 only");
      if (m == 0 && a.imag() != 0.0) throw std::invalid_argument("a_0 must be real");
    }
  }
};

inline PolyContour build_contour(FourierPerturbation const& p, std::size_t n_vertices) {
  if (n_vertices < 16) throw std::invalid_argument("build_contour: need at least 16 vertices");
  p.validate();
  PolyContour c;
  c.vertices.resize(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    double const t = -kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(n_vertices);
    double const r = p.radius(t);
    if (!(r > 0.0)) {
      std::ostringstream ss;
      ss << "radius " << r << " at t=" << t << " is not positive";
      throw NonPositiveRadius(ss.str());
    }
    c.vertices[i] = {r * std::cos(t), r * std::sin(t)};
  }
  return c;
}

//! Discretisation of the contour integrals.
//! fourth_order: five-point periodic tangents with respect to t and the
//! trapezoid rule for length, area and the double integral.
//! polygon: central-difference tangents for the double sum, segment lengths
//! and the shoelace area.
enum class OracleScheme { fourth_order, polygon };

struct EnergyTerms {
  double length = 0.0;
  double area = 0.0;
  double quadratic = 0.0;
  double total = 0.0;
};

namespace detail {

inline std::vector<Vec2> oracle_tangents(PolyContour const& c, OracleScheme scheme) {
  auto const& v = c.vertices;
  std::size_t const n = v.size();
  double const h = kTwoPi / static_cast<double>(n);
  std::vector<Vec2> tau(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 const& p1 = v[(i + 1) % n];
    Vec2 const& m1 = v[(i + n - 1) % n];
    if (scheme == OracleScheme::polygon) {
      tau[i] = (p1 - m1) / (2.0 * h);
    } else {
      Vec2 const& p2 = v[(i + 2) % n];
      Vec2 const& m2 = v[(i + n - 2) % n];
      tau[i] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    }
  }
  return tau;
}

inline double oracle_length(PolyContour const& c, std::vector<Vec2> const& tau, OracleScheme scheme) {
  auto const& v = c.vertices;
  std::size_t const n = v.size();
  double s = 0.0;
  if (scheme == OracleScheme::polygon) {
    for (std::size_t i = 0; i < n; ++i) s += norm(v[(i + 1) % n] - v[i]);
    return s;
  }
  for (auto const& t : tau) s += norm(t);
  return s * kTwoPi / static_cast<double>(n);
}

inline double oracle_area(PolyContour const& c, std::vector<Vec2> const& tau, OracleScheme scheme) {
  auto const& v = c.vertices;
  std::size_t const n = v.size();
  double s = 0.0;
  if (scheme == OracleScheme::polygon) {
    for (std::size_t i = 0; i < n; ++i) s += cross(v[i], v[(i + 1) % n]);
    return 0.5 * s;
  }
  for (std::size_t i = 0; i < n; ++i) s += cross(v[i], tau[i]);
  return 0.5 * s * kTwoPi / static_cast<double>(n);
}

// sum over ordered pairs (i, j) of tau_i . tau_j Phi(|x_i - x_j|), without the
// dt^2 factor. Each unordered pair is evaluated once with i < j and counted
// twice, so the value does not depend on which index is called i.
inline double pair_term(std::vector<Vec2> const& v, std::vector<Vec2> const& tau, std::size_t i,
                        std::size_t j, InteractionParams const& ip, double cutoff2) {
  Vec2 const dx = v[i] - v[j];
  double const r2 = norm2(dx);
  if (r2 >= cutoff2) return 0.0;
  return dot(tau[i], tau[j]) * phi(std::sqrt(r2), ip);
}

}  // namespace detail

//! Double sum sum_{i,j} tau_i . tau_j Phi(|x_i - x_j|) dt^2, including i = j.
inline double quadratic_sum(PolyContour const& c, std::vector<Vec2> const& tau,
                            InteractionParams const& ip) {
  auto const& v = c.vertices;
  std::size_t const n = v.size();
  double const cutoff2 = ip.support() * ip.support();
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag += detail::pair_term(v, tau, i, i, ip, cutoff2);
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) row += detail::pair_term(v, tau, i, j, ip, cutoff2);
    off += row;
  }
  double const h = kTwoPi / static_cast<double>(n);
  return (diag + 2.0 * off) * h * h;
}

inline EnergyTerms energy(PolyContour const& c, PriorParams const& params,
                          OracleScheme scheme = OracleScheme::fourth_order) {
  c.validate();
  auto const tau = detail::oracle_tangents(c, scheme);
  EnergyTerms e;
  e.length = detail::oracle_length(c, tau, scheme);
  e.area = detail::oracle_area(c, tau, scheme);
  double const q = params.beta_c == 0.0 ? 0.0 : quadratic_sum(c, tau, params.interaction());
  e.quadratic = -0.5 * params.beta_c * q;
  e.total = params.lambda_c * e.length + params.alpha_c * e.area + e.quadratic;
  return e;
}

//! energy(c) - energy(base) for two contours with the same vertex count,
//! accumulated term by term so that small differences keep their precision.
inline EnergyTerms energy_delta(PolyContour const& c, PolyContour const& base,
                                PriorParams const& params,
                                OracleScheme scheme = OracleScheme::fourth_order) {
  c.validate();
  base.validate();
  if (c.size() != base.size()) throw std::invalid_argument("energy_delta: vertex counts differ");
  std::size_t const n = c.size();
  double const h = kTwoPi / static_cast<double>(n);
  auto const ta = detail::oracle_tangents(c, scheme);
  auto const tb = detail::oracle_tangents(base, scheme);
  auto const& va = c.vertices;
  auto const& vb = base.vertices;

  EnergyTerms e;
  if (scheme == OracleScheme::polygon) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t const k = (i + 1) % n;
      e.length += norm(va[k] - va[i]) - norm(vb[k] - vb[i]);
      e.area += 0.5 * (cross(va[i], va[k]) - cross(vb[i], vb[k]));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      e.length += (norm(ta[i]) - norm(tb[i])) * h;
      e.area += 0.5 * (cross(va[i], ta[i]) - cross(vb[i], tb[i])) * h;
    }
  }

  if (params.beta_c != 0.0) {
    auto const ip = params.interaction();
    double const cutoff2 = ip.support() * ip.support();
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += detail::pair_term(va, ta, i, i, ip, cutoff2) - detail::pair_term(vb, tb, i, i, ip, cutoff2);
      double row = 0.0;
      for (std::size_t j = i + 1; j < n; ++j)
        row += detail::pair_term(va, ta, i, j, ip, cutoff2) - detail::pair_term(vb, tb, i, j, ip, cutoff2);
      off += row;
    }
    e.quadratic = -0.5 * params.beta_c * (diag + 2.0 * off) * h * h;
  }
  e.total = params.lambda_c * e.length + params.alpha_c * e.area + e.quadratic;
  return e;
}

//! Coefficients of the analytic expansion about a circle of radius r0 for
//! modes 0..m_max.
struct TaylorModel {
  double r0 = 1.0;
  double e0 = 0.0;
  double e1 = 0.0;
  std::vector<double> e2;  // indexed by m

  TaylorModel(PriorParams const& params, double r0_, int m_max) : r0(r0_) {
    e0 = goc::e0(r0, params);
    e1 = goc::e1(r0, params);
    for (int m = 0; m <= m_max; ++m) e2.push_back(goc::e2(m / r0, r0, params));
  }

  //! s a0 e1 + 1/2 sum over k in Z of s^2 |a_k|^2 e2(k); the sum over +-m
  //! collapses onto m > 0 with weight 1.
  double increment(FourierPerturbation const& p, double s) const {
    double v = 0.0;
    for (auto const& [m, a] : p.coeffs) {
      if (m >= static_cast<int>(e2.size())) throw std::out_of_range("TaylorModel: mode beyond m_max");
      double const a2 = std::norm(s * a);
      if (m == 0) {
        v += s * a.real() * e1 + 0.5 * a2 * e2[0];
      } else {
        v += a2 * e2[static_cast<std::size_t>(m)];
      }
    }
    return v;
  }
};

struct TaylorResidual {
  //! energy(build_contour(s p)) - [e0 + s a0 e1 + 1/2 sum s^2 |a_k|^2 e2].
  double raw = 0.0;
  //! Same with the oracle's own energy of the unperturbed circle in place of
  //! e0, which removes the constant discretisation offset.
  double incremental = 0.0;
};

inline TaylorResidual taylor_residual(FourierPerturbation const& p, double s,
                                      PriorParams const& params, TaylorModel const& model,
                                      std::size_t n_vertices = 4096,
                                      OracleScheme scheme = OracleScheme::fourth_order) {
  auto const base = build_contour(FourierPerturbation{p.r0, {}}, n_vertices);
  auto const c = build_contour(p.scaled(s), n_vertices);
  double const inc = model.increment(p, s);
  TaylorResidual r;
  double const de = energy_delta(c, base, params, scheme).total;
  r.incremental = de - inc;
  r.raw = energy(c, params, scheme).total - (model.e0 + inc);
  return r;
}

inline TaylorResidual taylor_residual(FourierPerturbation const& p, double s,
                                      PriorParams const& params, std::size_t n_vertices = 4096,
                                      OracleScheme scheme = OracleScheme::fourth_order) {
  int m_max = 0;
  for (auto const& [m, a] : p.coeffs) m_max = std::max(m_max, m);
  return taylor_residual(p, s, params, TaylorModel(params, p.r0, m_max), n_vertices, scheme);
}

//! Random perturbation over modes 0..m_max with complex Gaussian coefficients
//! (a_0 real), rescaled so that sup |r - r0| = amplitude.
inline FourierPerturbation random_perturbation(boost::random::mt19937_64& rng, double r0, int m_max,
                                               double amplitude) {
  boost::random::normal_distribution<double> g;
  FourierPerturbation p{r0, {}};
  for (int m = 0; m <= m_max; ++m) {
    double const re = g(rng);
    double const im = g(rng);
    p.coeffs[m] = m == 0 ? std::complex<double>(re, 0.0) : std::complex<double>(re, im);
  }
  return p.scaled(amplitude / p.sup_amplitude());
}

//! Least-squares slope of log|y| against log x.
inline double loglog_slope(std::vector<double> const& x, std::vector<double> const& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  std::size_t const n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(std::abs(y[i]));
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double const dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(std::abs(y[i])) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace goc

#endif  // GOC_CONTOUR_ORACLE_HPP_
