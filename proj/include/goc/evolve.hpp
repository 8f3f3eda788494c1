#ifndef GOC_EVOLVE_HPP_
#define GOC_EVOLVE_HPP_

// Level-set gradient descent on the prior energy, optionally with image data.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "goc/boundary.hpp"
#include "goc/forces.hpp"
#include "goc/levelset.hpp"
#include "goc/stability.hpp"

namespace goc {

struct EvolveOptions {
  //! Upper bound on the time step; dt is otherwise 0.9 / max |speed|.
  double dt_cap = 0.5;
  int max_iters = 5000;
  int redistance_every = 20;
  //! Stop when max |speed| falls below this.
  double tol = 1e-3;
  //! Explicit curvature flow needs dt * lambda_c <= this (unit grid spacing).
  double curvature_cfl = 0.25;
  //! phi is averaged over consecutive windows of stall_window iterations.
  //! The region is considered stationary when the mean |difference| of two
  //! successive window averages at grid points within one pixel of the
  //! boundary, divided by stall_window, stays below stall_tol (pixels per
  //! iteration) or below stall_rel times the mean step dt * max |speed| of the
  //! window, stall_checks times in a row. The relative test catches a boundary
  //! pinned at an image edge, which keeps oscillating by up to a step.
  //! stall_window = 0 disables this.
  int stall_window = 50;
  int stall_checks = 2;
  double stall_tol = 2.5e-4;
  double stall_rel = 2e-3;
  std::size_t min_component_cells = 2;
};

struct IterationRecord {
  int iter = 0;
  double max_speed = 0.0;
  //! Area enclosed by the zero level set (pixels^2).
  double area = 0.0;
  std::size_t num_components = 0;
};

struct EvolveResult {
  LevelSetField field;
  std::vector<IterationRecord> log;
  bool converged = false;
  bool vanished = false;
  int iterations = 0;
};

//! Called with (iteration, field) every snapshot_every iterations.
using SnapshotFn = std::function<void(int, LevelSetField const&)>;

namespace detail {

// Speed of the nearest boundary sample at every grid point, found by
// propagating nearest-sample candidates in raster sweeps.
class SpeedExtension {
 public:
  void run(LevelSetField const& f, std::vector<BoundarySample> const& s, std::vector<double> const& speed,
           std::vector<double>& out) {
    int const w = f.width, h = f.height;
    std::size_t const n = f.values.size();
    nearest_.assign(n, -1);
    dist2_.assign(n, std::numeric_limits<double>::infinity());
    auto offer = [&](int x, int y, int k) {
      if (x < 0 || y < 0 || x >= w || y >= h || k < 0) return;
      std::size_t const i = f.index(x, y);
      double const d2 = norm2(Vec2{double(x), double(y)} - s[static_cast<std::size_t>(k)].position);
      if (d2 < dist2_[i] || (d2 == dist2_[i] && k < nearest_[i])) {
        dist2_[i] = d2;
        nearest_[i] = k;
      }
    };
    for (std::size_t k = 0; k < s.size(); ++k) {
      int const x0 = static_cast<int>(std::floor(s[k].position.x));
      int const y0 = static_cast<int>(std::floor(s[k].position.y));
      for (int y = y0 - 1; y <= y0 + 2; ++y)
        for (int x = x0 - 1; x <= x0 + 2; ++x) offer(x, y, static_cast<int>(k));
    }
    auto pull = [&](int x, int y, int nx, int ny) {
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
      offer(x, y, nearest_[f.index(nx, ny)]);
    };
    for (int round = 0; round < 2; ++round) {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          pull(x, y, x - 1, y);
          pull(x, y, x - 1, y - 1);
          pull(x, y, x, y - 1);
          pull(x, y, x + 1, y - 1);
        }
      for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
          pull(x, y, x + 1, y);
          pull(x, y, x + 1, y + 1);
          pull(x, y, x, y + 1);
          pull(x, y, x - 1, y + 1);
        }
    }
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (nearest_[i] >= 0) out[i] = speed[static_cast<std::size_t>(nearest_[i])];
  }

 private:
  std::vector<int> nearest_;
  std::vector<double> dist2_;
};

// One first-order Godunov upwind step of phi_t + F |grad phi| = 0.
inline void upwind_step(LevelSetField& f, std::vector<double> const& speed, double dt) {
  int const w = f.width, h = f.height;
  double const band = f.band_half_width;
  std::vector<double> next(f.values.size());
  auto v = [&](int x, int y) { return f.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::size_t const i = f.index(x, y);
      double const c = f.values[i];
      double const F = speed[i];
      if (F == 0.0) {
        next[i] = c;
        continue;
      }
      double const dmx = c - v(x - 1, y), dpx = v(x + 1, y) - c;
      double const dmy = c - v(x, y - 1), dpy = v(x, y + 1) - c;
      double g2;
      if (F > 0.0) {
        g2 = std::pow(std::max(dmx, 0.0), 2) + std::pow(std::min(dpx, 0.0), 2) + std::pow(std::max(dmy, 0.0), 2) +
             std::pow(std::min(dpy, 0.0), 2);
      } else {
        g2 = std::pow(std::min(dmx, 0.0), 2) + std::pow(std::max(dpx, 0.0), 2) + std::pow(std::min(dmy, 0.0), 2) +
             std::pow(std::max(dpy, 0.0), 2);
      }
      next[i] = std::clamp(c - dt * F * std::sqrt(g2), -band, band);
    }
  }
  f.values.swap(next);
}

// Mean |a - b| over grid points where |b| < 1.
inline double interface_change(std::vector<double> const& a, std::vector<double> const& b) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (std::abs(b[i]) < 1.0) {
      s += std::abs(a[i] - b[i]);
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

}  // namespace detail

//! Gradient descent from the given field. data may be null (prior only).
inline EvolveResult evolve(LevelSetField field, PriorParams const& p, DataTerm const* data,
                           EvolveOptions const& o = {}, SnapshotFn const& snapshot = {}, int snapshot_every = 0) {
  if (data && (data->image.width != field.width || data->image.height != field.height))
    throw std::invalid_argument("evolve: image and level set grids differ");
  if (!(p.lambda_c > 0.0)) throw std::invalid_argument("evolve: lambda_c must be positive");
  p.interaction().validate();

  EvolveResult res;
  detail::SpeedExtension ext;
  std::vector<double> grid_speed;
  std::vector<double> window_sum(field.values.size(), 0.0);
  std::vector<double> previous_mean;
  double step_sum = 0.0;
  int stalls = 0;
  double moved = 0.0;
  int since_redistance = 0;
  double const dt_max = std::min(o.dt_cap, o.curvature_cfl / p.lambda_c);

  for (int it = 0; it < o.max_iters; ++it) {
    auto comps = label_components(field);
    if (remove_small_components(field, comps, o.min_component_cells) > 0) {
      redistance(field);
      since_redistance = 0;
      moved = 0.0;
      comps = label_components(field);
    }
    IterationRecord rec{it, 0.0, 0.0, comps.sizes.size()};
    if (comps.sizes.empty()) {
      res.log.push_back(rec);
      res.vanished = true;
      res.converged = true;
      break;
    }
    auto const lines = zero_level_polylines(field);
    rec.area = enclosed_area(lines);
    auto const samples = samples_from_polylines(lines, curvature_grid(field));
    auto speed = prior_force(samples, p);
    if (data) {
      auto const fd = data_force(samples, *data);
      for (std::size_t i = 0; i < speed.size(); ++i) speed[i] += fd[i];
    }
    for (double s : speed) rec.max_speed = std::max(rec.max_speed, std::abs(s));
    res.log.push_back(rec);
    res.iterations = it;
    if (snapshot && snapshot_every > 0 && it % snapshot_every == 0) snapshot(it, field);
    if (rec.max_speed < o.tol) {
      res.converged = true;
      break;
    }

    double const dt = std::min(0.9 / rec.max_speed, dt_max);
    ext.run(field, samples, speed, grid_speed);
    detail::upwind_step(field, grid_speed, dt);
    moved += dt * rec.max_speed;
    step_sum += dt * rec.max_speed;
    ++since_redistance;
    if (since_redistance >= o.redistance_every || moved > 0.5 * field.band_half_width) {
      redistance(field);
      since_redistance = 0;
      moved = 0.0;
    }

    if (o.stall_window > 0) {
      for (std::size_t i = 0; i < window_sum.size(); ++i) window_sum[i] += field.values[i];
      if ((it + 1) % o.stall_window == 0) {
        for (double& v : window_sum) v /= o.stall_window;
        if (!previous_mean.empty()) {
          double const rate = detail::interface_change(window_sum, previous_mean) / o.stall_window;
          double const step = step_sum / o.stall_window;
          stalls = (rate < o.stall_tol || rate < o.stall_rel * step) ? stalls + 1 : 0;
        }
        previous_mean.swap(window_sum);
        window_sum.assign(previous_mean.size(), 0.0);
        step_sum = 0.0;
        if (stalls >= o.stall_checks) {
          res.converged = true;
          res.iterations = it + 1;
          break;
        }
      }
    }
    res.iterations = it + 1;
  }
  if (!res.vanished && field.inside_count() == 0) {
    res.vanished = true;
    res.converged = true;
  }
  res.field = std::move(field);
  return res;
}

inline EvolveResult evolve(LevelSetField field, PriorParams const& p, EvolveOptions const& o = {}) {
  return evolve(std::move(field), p, nullptr, o);
}

inline void write_log_csv(std::ostream& os, std::vector<IterationRecord> const& log) {
  os << "iter,max_speed,area,num_components\n";
  auto const old = os.precision(12);
  for (auto const& r : log) os << r.iter << ',' << r.max_speed << ',' << r.area << ',' << r.num_components << '\n';
  os.precision(old);
}

struct ExtractionResult {
  Mask mask;
  EvolveResult evolution;
};

//! Object extraction from an image: the image is padded with mu_bar and the
//! region starts as a rounded rectangle slightly bigger than the image.
inline ExtractionResult extract_objects(ImageGrid const& image, PriorParams const& p, LikelihoodParams const& lik,
                                        EvolveOptions const& o = {}, double band = 0.0, int pad = 4,
                                        SnapshotFn const& snapshot = {}, int snapshot_every = 0) {
  image.validate();
  if (band <= 0.0) band = default_band(p.d, p.epsilon);
  DataTerm const data(pad_image(image, pad, lik.mu_bar), lik);
  int const w = image.width + 2 * pad;
  int const h = image.height + 2 * pad;
  RoundedRectangleShape const rr{{pad - 2.0, pad - 2.0}, {double(pad + image.width + 1), double(pad + image.height + 1)}, 4.0};
  auto field = init_shape({rr}, w, h, band);
  ExtractionResult out;
  out.evolution = evolve(std::move(field), p, &data, o, snapshot, snapshot_every);
  out.mask = crop_mask(out.evolution.field.mask(), pad, image.width, image.height);
  return out;
}

}  // namespace goc

#endif  // GOC_EVOLVE_HPP_
