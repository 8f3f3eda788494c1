#ifndef GOC_CONFIG_HPP_
#define GOC_CONFIG_HPP_

// Flat `section.key = value` run configuration.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "goc/errors.hpp"
#include "goc/evolve.hpp"
#include "goc/levelset.hpp"
#include "goc/likelihood.hpp"
#include "goc/stability.hpp"
#include "goc/synthbench.hpp"
#include "goc/version.hpp"

namespace goc {

namespace detail {

inline std::string trim(std::string const& s) {
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string const& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_double(std::string const& s, std::string const& what) {
  char* end = nullptr;
  double const v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(what + ": not a number: '" + s + "'");
  return v;
}

inline long long parse_int(std::string const& s, std::string const& what) {
  char* end = nullptr;
  long long const v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(what + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace detail

inline std::set<std::string> const& known_config_keys() {
  static std::set<std::string> const keys = {
      "prior.lambda_c", "prior.alpha_c", "prior.beta_c", "prior.d", "prior.epsilon", "prior.r0_hat",
      "prior.prior_factor",
      "likelihood.mu", "likelihood.sigma", "likelihood.mu_bar", "likelihood.sigma_bar", "likelihood.lambda_i",
      "evolve.dt_cap", "evolve.max_iters", "evolve.redistance_every", "evolve.band_half_width", "evolve.tol",
      "evolve.curvature_cfl", "evolve.stall_window", "evolve.stall_checks", "evolve.stall_tol",
      "evolve.stall_rel", "evolve.min_component_cells", "evolve.snapshot_every", "evolve.pad",
      "io.image", "io.init", "io.init_shape", "io.mask", "io.truth", "io.out_dir",
      "synth.size", "synth.n_big", "synth.r_big", "synth.n_small", "synth.r_small", "synth.min_gap",
      "synth.foreground", "synth.background",
      "score.r_target",
  };
  return keys;
}

//! Key/value pairs of one or more config files; later files override earlier ones.
class FlatConfig {
 public:
  void parse(std::istream& is, std::string const& source = "<config>") {
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      auto const hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty() || line[0] == ';') continue;
      auto const eq = line.find('=');
      std::string const where = source + ":" + std::to_string(lineno);
      if (eq == std::string::npos) throw ParseError(where + ": expected 'section.key = value'");
      std::string const key = detail::trim(line.substr(0, eq));
      std::string const value = detail::trim(line.substr(eq + 1));
      if (!known_config_keys().count(key)) throw ParseError(where + ": unknown key '" + key + "'");
      if (value.empty()) throw ParseError(where + ": empty value for '" + key + "'");
      if (!seen.insert(key).second) throw ParseError(where + ": duplicate key '" + key + "'");
      entries_[key] = value;
    }
  }

  void parse_file(std::string const& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    parse(is, path);
  }

  void set(std::string const& key, std::string const& value) {
    if (!known_config_keys().count(key)) throw ParseError("unknown key '" + key + "'");
    entries_[key] = value;
  }

  bool has(std::string const& key) const { return entries_.count(key) != 0; }
  std::string const& raw(std::string const& key) const { return entries_.at(key); }
  std::map<std::string, std::string> const& entries() const { return entries_; }

  double number(std::string const& key, double fallback) const {
    return has(key) ? detail::parse_double(raw(key), key) : fallback;
  }
  long long integer(std::string const& key, long long fallback) const {
    return has(key) ? detail::parse_int(raw(key), key) : fallback;
  }
  std::string text(std::string const& key, std::string const& fallback = {}) const {
    return has(key) ? raw(key) : fallback;
  }

  //! FNV-1a (64 bit) of the sorted "key=value" lines.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto const& [k, v] : entries_) {
      for (char c : k + "=" + v + "\n") {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
      }
    }
    return h;
  }

 private:
  std::map<std::string, std::string> entries_;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

//! "goc <version> seed=<seed> config=<hash>", written at the top of every output.
inline std::string provenance_line(std::uint64_t seed, std::uint64_t config_hash) {
  return std::string("goc ") + kVersion + " seed=" + std::to_string(seed) + " config=" + hex64(config_hash);
}

struct IoPaths {
  std::string image;
  std::string init;
  std::string init_shape;
  std::string mask;
  std::string truth;
  std::string out_dir;
};

struct RunConfig {
  PriorParams prior;
  bool beta_auto = false;
  //! If positive, lambda_c = alpha_c = prior_factor (mu - mu_bar)^2 / (sigma^2 + sigma_bar^2).
  double prior_factor = 0.0;
  LikelihoodParams likelihood;
  bool has_likelihood = false;
  EvolveOptions evolve;
  //! 0 selects default_band(d, epsilon).
  double band_half_width = 0.0;
  int snapshot_every = 0;
  int pad = 4;
  CircleSceneOptions synth;
  double r_target = 0.0;
  IoPaths io;
  std::uint64_t hash = 0;

  double band() const { return band_half_width > 0.0 ? band_half_width : default_band(prior.d, prior.epsilon); }
};

//! Reads every known key. Syntax errors raise ParseError; semantic checks are
//! left to resolve_prior and the library.
inline RunConfig to_run_config(FlatConfig const& c) {
  RunConfig r;
  auto& p = r.prior;
  p.lambda_c = c.number("prior.lambda_c", p.lambda_c);
  p.alpha_c = c.number("prior.alpha_c", p.alpha_c);
  if (c.text("prior.beta_c") == "auto")
    r.beta_auto = true;
  else
    p.beta_c = c.number("prior.beta_c", p.beta_c);
  p.d = c.number("prior.d", p.d);
  p.epsilon = c.number("prior.epsilon", p.epsilon);
  p.r0_hat = c.number("prior.r0_hat", p.r0_hat);
  r.prior_factor = c.number("prior.prior_factor", 0.0);

  auto& l = r.likelihood;
  r.has_likelihood = c.has("likelihood.mu") || c.has("likelihood.mu_bar") || c.has("likelihood.lambda_i");
  l.mu = c.number("likelihood.mu", l.mu);
  l.sigma = c.number("likelihood.sigma", l.sigma);
  l.mu_bar = c.number("likelihood.mu_bar", l.mu_bar);
  l.sigma_bar = c.number("likelihood.sigma_bar", l.sigma_bar);
  l.lambda_i = c.number("likelihood.lambda_i", l.lambda_i);

  auto& e = r.evolve;
  e.dt_cap = c.number("evolve.dt_cap", e.dt_cap);
  e.max_iters = static_cast<int>(c.integer("evolve.max_iters", e.max_iters));
  e.redistance_every = static_cast<int>(c.integer("evolve.redistance_every", e.redistance_every));
  e.tol = c.number("evolve.tol", e.tol);
  e.curvature_cfl = c.number("evolve.curvature_cfl", e.curvature_cfl);
  e.stall_window = static_cast<int>(c.integer("evolve.stall_window", e.stall_window));
  e.stall_checks = static_cast<int>(c.integer("evolve.stall_checks", e.stall_checks));
  e.stall_tol = c.number("evolve.stall_tol", e.stall_tol);
  e.stall_rel = c.number("evolve.stall_rel", e.stall_rel);
  e.min_component_cells = static_cast<std::size_t>(
      c.integer("evolve.min_component_cells", static_cast<long long>(e.min_component_cells)));
  r.band_half_width = c.number("evolve.band_half_width", 0.0);
  r.snapshot_every = static_cast<int>(c.integer("evolve.snapshot_every", 0));
  r.pad = static_cast<int>(c.integer("evolve.pad", r.pad));

  auto& s = r.synth;
  s.size = static_cast<int>(c.integer("synth.size", s.size));
  s.n_big = static_cast<int>(c.integer("synth.n_big", s.n_big));
  s.r_big = c.number("synth.r_big", s.r_big);
  s.n_small = static_cast<int>(c.integer("synth.n_small", s.n_small));
  s.r_small = c.number("synth.r_small", s.r_small);
  s.min_gap = c.number("synth.min_gap", s.min_gap);
  s.foreground = c.number("synth.foreground", s.foreground);
  s.background = c.number("synth.background", s.background);
  r.r_target = c.number("score.r_target", 0.0);

  r.io.image = c.text("io.image");
  r.io.init = c.text("io.init");
  r.io.init_shape = c.text("io.init_shape");
  r.io.mask = c.text("io.mask");
  r.io.truth = c.text("io.truth");
  r.io.out_dir = c.text("io.out_dir");
  r.hash = c.hash();
  return r;
}

inline RunConfig load_run_config(std::vector<std::string> const& paths) {
  FlatConfig c;
  for (auto const& p : paths) c.parse_file(p);
  return to_run_config(c);
}

//! lambda_c = alpha_c = factor (mu - mu_bar)^2 / (sigma^2 + sigma_bar^2).
inline double likelihood_prior_weight(LikelihoodParams const& l, double factor) {
  double const s2 = l.sigma * l.sigma + l.sigma_bar * l.sigma_bar;
  if (!std::isfinite(s2) || !(s2 > 0.0)) throw InvalidParameters("prior_factor needs finite positive sigmas");
  return factor * (l.mu - l.mu_bar) * (l.mu - l.mu_bar) / s2;
}

//! Applies prior_factor and `auto` beta. With auto beta the parameters are
//! validated and InvalidParameters carries the reason if r0_hat is not a
//! stable minimum.
inline StabilityReport resolve_prior(RunConfig& r, ValidateOptions const& vo = {}) {
  if (r.prior_factor > 0.0) {
    if (!r.has_likelihood) throw InvalidParameters("prior.prior_factor needs likelihood parameters");
    r.prior.lambda_c = r.prior.alpha_c = likelihood_prior_weight(r.likelihood, r.prior_factor);
  }
  if (!(r.prior.lambda_c > 0.0)) throw InvalidParameters("high-frequency instability (lambda_c <= 0)");
  StabilityReport rep;
  if (r.beta_auto) {
    r.prior.beta_c = beta_for_minimum(r.prior);
    rep = validate(r.prior, vo);
    if (!rep.valid) throw InvalidParameters(rep.reason);
  }
  return rep;
}

struct ShapeSpec {
  int width = 0;
  int height = 0;
  std::vector<Shape> shapes;
};

//! "WxH;circle:cx,cy,r;square:cx,cy,side;rrect:x0,y0,x1,y1,radius". The size
//! token may be omitted when the grid size is known otherwise.
inline ShapeSpec parse_shape_spec(std::string const& spec) {
  ShapeSpec out;
  for (auto const& tok : detail::split(spec, ';')) {
    if (tok.empty()) continue;
    auto const colon = tok.find(':');
    if (colon == std::string::npos) {
      auto const x = tok.find('x');
      if (x == std::string::npos) throw ParseError("shape spec: bad token '" + tok + "'");
      out.width = static_cast<int>(detail::parse_int(tok.substr(0, x), "shape spec width"));
      out.height = static_cast<int>(detail::parse_int(tok.substr(x + 1), "shape spec height"));
      continue;
    }
    std::string const kind = tok.substr(0, colon);
    std::vector<double> v;
    for (auto const& a : detail::split(tok.substr(colon + 1), ',')) v.push_back(detail::parse_double(a, "shape spec"));
    auto need = [&](std::size_t n) {
      if (v.size() != n) throw ParseError("shape spec: '" + kind + "' takes " + std::to_string(n) + " numbers");
    };
    if (kind == "circle") {
      need(3);
      out.shapes.push_back(CircleShape{{v[0], v[1]}, v[2]});
    } else if (kind == "square") {
      need(3);
      out.shapes.push_back(SquareShape{{v[0], v[1]}, v[2]});
    } else if (kind == "rrect") {
      need(5);
      out.shapes.push_back(RoundedRectangleShape{{v[0], v[1]}, {v[2], v[3]}, v[4]});
    } else {
      throw ParseError("shape spec: unknown shape '" + kind + "'");
    }
  }
  if (out.shapes.empty()) throw ParseError("shape spec: no shapes");
  return out;
}

//! Likelihood parameters as config lines.
inline void write_likelihood_config(std::ostream& os, LikelihoodParams const& l) {
  auto const old = os.precision(12);
  os << "likelihood.mu = " << l.mu << '\n'
     << "likelihood.sigma = " << l.sigma << '\n'
     << "likelihood.mu_bar = " << l.mu_bar << '\n'
     << "likelihood.sigma_bar = " << l.sigma_bar << '\n'
     << "likelihood.lambda_i = " << l.lambda_i << '\n';
  os.precision(old);
}

}  // namespace goc

#endif  // GOC_CONFIG_HPP_
