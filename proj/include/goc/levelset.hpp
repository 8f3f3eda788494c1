#ifndef GOC_LEVELSET_HPP_
#define GOC_LEVELSET_HPP_

// Signed-distance level-set field on the pixel grid, initial shapes, zero
// level-set extraction and re-initialisation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>
#include <variant>
#include <vector>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"
#include "goc/image.hpp"

namespace goc {

//! Values are signed distances, negative inside the region, sampled at the
//! integer points (x, y) = (column, row) and clamped to +-band_half_width.
struct LevelSetField {
  int width = 0;
  int height = 0;
  double band_half_width = 8.0;
  std::vector<double> values;

  LevelSetField() = default;
  LevelSetField(int w, int h, double band)
      : width(w), height(h), band_half_width(band),
        values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), band) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  double& at(int x, int y) { return values[index(x, y)]; }
  double at(int x, int y) const { return values[index(x, y)]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool inside(int x, int y) const { return at(x, y) < 0.0; }

  //! Value with points outside the grid treated as far outside the region.
  double padded(int x, int y) const { return contains(x, y) ? at(x, y) : band_half_width; }

  Mask mask() const {
    Mask m(width, height);
    for (std::size_t i = 0; i < values.size(); ++i) m.data[i] = values[i] < 0.0 ? 1 : 0;
    return m;
  }

  //! Number of grid points inside the region.
  std::size_t inside_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v < 0.0; }));
  }
};

//! Band half-width used unless configured: max(8, d + eps + 2).
inline double default_band(double d, double epsilon) { return std::max(8.0, d + epsilon + 2.0); }

struct CircleShape {
  Vec2 center;
  double radius = 1.0;
};

//! Axis-aligned square.
struct SquareShape {
  Vec2 center;
  double side = 1.0;
};

//! Axis-aligned rectangle [lo, hi] with corners rounded to the given radius.
struct RoundedRectangleShape {
  Vec2 lo;
  Vec2 hi;
  double radius = 0.0;
};

using Shape = std::variant<CircleShape, SquareShape, RoundedRectangleShape>;

namespace detail {

inline double box_sdf(Vec2 p, Vec2 c, Vec2 half) {
  double const qx = std::abs(p.x - c.x) - half.x;
  double const qy = std::abs(p.y - c.y) - half.y;
  double const ox = std::max(qx, 0.0);
  double const oy = std::max(qy, 0.0);
  return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
}

}  // namespace detail

inline double signed_distance(Shape const& s, Vec2 p) {
  return std::visit(
      [&](auto const& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return norm(p - sh.center) - sh.radius;
        } else if constexpr (std::is_same_v<T, SquareShape>) {
          return detail::box_sdf(p, sh.center, {0.5 * sh.side, 0.5 * sh.side});
        } else {
          Vec2 const c = 0.5 * (sh.lo + sh.hi);
          Vec2 const half{0.5 * (sh.hi.x - sh.lo.x) - sh.radius, 0.5 * (sh.hi.y - sh.lo.y) - sh.radius};
          return detail::box_sdf(p, c, half) - sh.radius;
        }
      },
      s);
}

//! Signed distance to the union of the shapes (minimum over shapes).
inline LevelSetField init_shape(std::vector<Shape> const& shapes, int width, int height, double band) {
  if (width < 2 || height < 2) throw std::invalid_argument("init_shape: grid too small");
  LevelSetField f(width, height, band);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = std::numeric_limits<double>::infinity();
      for (auto const& s : shapes) v = std::min(v, signed_distance(s, {double(x), double(y)}));
      f.at(x, y) = std::clamp(v, -band, band);
    }
  }
  if (f.inside_count() == 0) throw EmptyRegion("initial shapes contain no grid point");
  return f;
}

// ---------------------------------------------------------------------------
// Zero level set by marching squares.

//! Closed polyline of the zero level set, counterclockwise in (x, y) so the
//! region lies on the left and right_normal() of a tangent points outward.
struct Polyline {
  std::vector<Vec2> points;
};

namespace detail {

class MarchingSquares {
 public:
  explicit MarchingSquares(LevelSetField const& f) : f_(f), stride_(f.width + 2) {}

  std::vector<Polyline> run() {
    // Cells span x in [-1, W-1], y in [-1, H-1]; nodes off the grid are outside.
    for (int y = -1; y < f_.height; ++y)
      for (int x = -1; x < f_.width; ++x) cell(x, y);
    std::vector<Polyline> out;
    std::vector<bool> used(seg_from_.size(), false);
    std::unordered_map<long, std::size_t> start;
    start.reserve(seg_from_.size() * 2);
    for (std::size_t i = 0; i < seg_from_.size(); ++i) start[seg_from_[i]] = i;
    for (std::size_t i = 0; i < seg_from_.size(); ++i) {
      if (used[i]) continue;
      Polyline pl;
      std::size_t k = i;
      while (!used[k]) {
        used[k] = true;
        Vec2 const p = crossing(seg_from_[k]);
        if (pl.points.empty() || norm2(p - pl.points.back()) > 1e-18) pl.points.push_back(p);
        auto it = start.find(seg_to_[k]);
        if (it == start.end()) break;
        k = it->second;
      }
      if (pl.points.size() > 1 && norm2(pl.points.front() - pl.points.back()) <= 1e-18) pl.points.pop_back();
      if (pl.points.size() >= 3) out.push_back(std::move(pl));
    }
    return out;
  }

 private:
  // Edge keys: horizontal edge from node (x, y) to (x+1, y) and vertical edge
  // from (x, y) to (x, y+1), with x, y >= -1.
  long hkey(int x, int y) const { return 2L * ((long(y) + 1) * stride_ + (x + 1)); }
  long vkey(int x, int y) const { return hkey(x, y) + 1; }

  Vec2 crossing(long key) const {
    bool const vert = key & 1;
    long const node = key / 2;
    int const x = static_cast<int>(node % stride_) - 1;
    int const y = static_cast<int>(node / stride_) - 1;
    int const x1 = vert ? x : x + 1;
    int const y1 = vert ? y + 1 : y;
    double const a = f_.padded(x, y);
    double const b = f_.padded(x1, y1);
    double const t = a / (a - b);
    return {x + t * (x1 - x), y + t * (y1 - y)};
  }

  void cell(int x, int y) {
    double const v[4] = {f_.padded(x, y), f_.padded(x + 1, y), f_.padded(x + 1, y + 1), f_.padded(x, y + 1)};
    bool const in[4] = {v[0] < 0.0, v[1] < 0.0, v[2] < 0.0, v[3] < 0.0};
    int const n_in = in[0] + in[1] + in[2] + in[3];
    if (n_in == 0 || n_in == 4) return;
    long const e[4] = {hkey(x, y), vkey(x + 1, y), hkey(x, y + 1), vkey(x, y)};
    // Going round the cell counterclockwise, edge k runs from corner k to k+1.
    // A segment leaves through an edge where inside turns to outside and ends
    // on an edge where outside turns to inside.
    int exits[2], entries[2], ne = 0, nn = 0;
    for (int k = 0; k < 4; ++k) {
      bool const a = in[k], b = in[(k + 1) % 4];
      if (a && !b) exits[ne++] = k;
      if (!a && b) entries[nn++] = k;
    }
    if (ne == 1) {
      add(e[exits[0]], e[entries[0]]);
      return;
    }
    // Saddle: the cell average decides whether the two inside corners connect.
    bool const centre_in = (v[0] + v[1] + v[2] + v[3]) < 0.0;
    for (int i = 0; i < 2; ++i) {
      int const k = exits[i];
      int const partner = centre_in ? (k + 1) % 4 : (k + 3) % 4;
      add(e[k], e[partner]);
    }
  }

  void add(long from, long to) {
    seg_from_.push_back(from);
    seg_to_.push_back(to);
  }

  LevelSetField const& f_;
  long stride_;
  std::vector<long> seg_from_;
  std::vector<long> seg_to_;
};

}  // namespace detail

//! Closed zero-level polylines; empty if the region is empty.
inline std::vector<Polyline> zero_level_polylines(LevelSetField const& f) {
  return detail::MarchingSquares(f).run();
}

//! Area enclosed by the polylines; holes (clockwise) count negative.
inline double enclosed_area(std::vector<Polyline> const& lines) {
  double a = 0.0;
  for (auto const& pl : lines) {
    std::size_t const n = pl.points.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(pl.points[i], pl.points[(i + 1) % n]);
  }
  return 0.5 * a;
}

//! Area of the region bounded by the zero level set.
inline double region_area(LevelSetField const& f) { return enclosed_area(zero_level_polylines(f)); }

//! Radius of the disc with the same area as the region.
inline double equivalent_radius(LevelSetField const& f) { return std::sqrt(std::max(region_area(f), 0.0) / kPi); }

// ---------------------------------------------------------------------------
// Re-initialisation.

//! kappa = div(grad phi / |grad phi|) at every grid point, central differences.
inline ImageGrid curvature_grid(LevelSetField const& f) {
  ImageGrid k(f.width, f.height);
  auto v = [&](int x, int y) {
    return f.at(std::clamp(x, 0, f.width - 1), std::clamp(y, 0, f.height - 1));
  };
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      double const px = 0.5 * (v(x + 1, y) - v(x - 1, y));
      double const py = 0.5 * (v(x, y + 1) - v(x, y - 1));
      double const pxx = v(x + 1, y) - 2 * v(x, y) + v(x - 1, y);
      double const pyy = v(x, y + 1) - 2 * v(x, y) + v(x, y - 1);
      double const pxy = 0.25 * (v(x + 1, y + 1) - v(x + 1, y - 1) - v(x - 1, y + 1) + v(x - 1, y - 1));
      double const g2 = px * px + py * py;
      double const g = std::sqrt(g2);
      double kv = 0.0;
      if (g > 1e-8) kv = (pxx * py * py - 2 * px * py * pxy + pyy * px * px) / (g2 * g);
      k.at(x, y) = std::clamp(kv, -1.0, 1.0);
    }
  }
  return k;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 const ab = b - a;
  double const l2 = norm2(ab);
  double t = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

//! Piece of the zero level between two consecutive polyline vertices: a
//! circular arc of curvature kappa (positive bulges to the right of a -> b,
//! i.e. outwards), or the chord when kappa is negligible.
struct ArcPiece {
  Vec2 a, b;
  Vec2 centre;
  double radius = 0.0;
  bool straight = true;

  ArcPiece(Vec2 a_, Vec2 b_, double kappa) : a(a_), b(b_) {
    Vec2 const ab = b - a;
    double const l = norm(ab);
    double const r = kappa != 0.0 ? 1.0 / std::abs(kappa) : 0.0;
    if (l <= 0.0 || std::abs(kappa) * l < 1e-6 || l >= 2.0 * r) return;
    straight = false;
    radius = r;
    Vec2 const left{-ab.y / l, ab.x / l};
    double const h = std::sqrt(r * r - 0.25 * l * l);
    centre = 0.5 * (a + b) + (kappa > 0.0 ? h : -h) * left;
  }

  double distance(Vec2 p) const {
    if (straight) return point_segment_distance(p, a, b);
    Vec2 const ca = a - centre, cb = b - centre, cp = p - centre;
    double const s = cross(ca, cb) >= 0.0 ? 1.0 : -1.0;
    if (s * cross(ca, cp) >= 0.0 && s * cross(cp, cb) >= 0.0) return std::abs(norm(cp) - radius);
    return std::min(norm(p - a), norm(p - b));
  }
};

}  // namespace detail

//! Restores |grad phi| = 1 in the band while keeping the zero level set.
//! Grid points within one pixel of the zero level get their distance to it,
//! with each marching-squares segment replaced by the circular arc through
//! its end points whose curvature is that of phi there (distances to the
//! chords alone would cut every convex corner and shrink the region a little
//! at each call). The rest of the band is filled by fast sweeping.
inline void redistance(LevelSetField& f, int max_sweeps = 64) {
  int const w = f.width, h = f.height;
  double const band = f.band_half_width;
  auto const lines = zero_level_polylines(f);
  ImageGrid const kappa = curvature_grid(f);
  std::vector<double> u(f.values.size(), band);
  std::vector<std::uint8_t> fixed(f.values.size(), 0);
  std::vector<bool> neg(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) neg[i] = f.values[i] < 0.0;

  for (auto const& pl : lines) {
    std::size_t const n = pl.points.size();
    for (std::size_t k = 0; k < n; ++k) {
      Vec2 const a = pl.points[k];
      Vec2 const b = pl.points[(k + 1) % n];
      detail::ArcPiece const piece(a, b, 0.5 * (kappa.sample(a) + kappa.sample(b)));
      int const x0 = static_cast<int>(std::floor(std::min(a.x, b.x))) - 1;
      int const x1 = static_cast<int>(std::ceil(std::max(a.x, b.x))) + 1;
      int const y0 = static_cast<int>(std::floor(std::min(a.y, b.y))) - 1;
      int const y1 = static_cast<int>(std::ceil(std::max(a.y, b.y))) + 1;
      for (int y = std::max(y0, 0); y <= std::min(y1, h - 1); ++y) {
        for (int x = std::max(x0, 0); x <= std::min(x1, w - 1); ++x) {
          std::size_t const i = f.index(x, y);
          double const dd = piece.distance({double(x), double(y)});
          if (dd < u[i]) u[i] = dd;
        }
      }
    }
  }
  // A node within one pixel of the zero level lies in the box of its nearest
  // piece, so its distance is exact; farther values are only upper bounds.
  for (std::size_t i = 0; i < u.size(); ++i) fixed[i] = u[i] <= 1.0;

  auto get = [&](int x, int y) { return (x < 0 || y < 0 || x >= w || y >= h) ? band : u[f.index(x, y)]; };
  for (int it = 0; it < max_sweeps; ++it) {
    double change = 0.0;
    for (int dir = 0; dir < 4; ++dir) {
      int const sx = (dir & 1) ? -1 : 1;
      int const sy = (dir & 2) ? -1 : 1;
      for (int jy = 0; jy < h; ++jy) {
        int const y = sy > 0 ? jy : h - 1 - jy;
        for (int jx = 0; jx < w; ++jx) {
          int const x = sx > 0 ? jx : w - 1 - jx;
          std::size_t const i = f.index(x, y);
          if (fixed[i]) continue;
          double const a = std::min(get(x - 1, y), get(x + 1, y));
          double const b = std::min(get(x, y - 1), get(x, y + 1));
          double cand;
          if (std::abs(a - b) >= 1.0)
            cand = std::min(a, b) + 1.0;
          else
            cand = 0.5 * (a + b + std::sqrt(2.0 - (a - b) * (a - b)));
          if (cand < u[i]) {
            change = std::max(change, u[i] - cand);
            u[i] = cand;
          }
        }
      }
    }
    if (change < 1e-12) break;
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    double const d = std::min(u[i], band);
    f.values[i] = neg[i] ? -std::max(d, 1e-12) : d;
  }
}

//! Signed distance field whose zero level passes midway between region and
//! background pixels of the mask.
inline LevelSetField init_from_mask(Mask const& m, double band) {
  if (m.count() == 0) throw EmptyRegion("mask has no region pixels");
  LevelSetField f(m.width, m.height, band);
  for (std::size_t i = 0; i < m.data.size(); ++i) f.values[i] = m.data[i] ? -0.5 : 0.5;
  redistance(f);
  return f;
}

// ---------------------------------------------------------------------------
// Connected components of the region (4-connectivity).

struct Components {
  std::vector<int> label;  // -1 outside, else component id
  std::vector<std::size_t> sizes;
};

inline Components label_components(Mask const& m, bool eight_connected = false) {
  Components c;
  c.label.assign(m.data.size(), -1);
  std::vector<std::size_t> stack;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      std::size_t const i0 = m.index(x, y);
      if (!m.data[i0] || c.label[i0] >= 0) continue;
      int const id = static_cast<int>(c.sizes.size());
      c.sizes.push_back(0);
      c.label[i0] = id;
      stack.push_back(i0);
      while (!stack.empty()) {
        std::size_t const i = stack.back();
        stack.pop_back();
        ++c.sizes[static_cast<std::size_t>(id)];
        int const px = static_cast<int>(i % static_cast<std::size_t>(m.width));
        int const py = static_cast<int>(i / static_cast<std::size_t>(m.width));
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (!eight_connected && dx != 0 && dy != 0)) continue;
            int const nx = px + dx, ny = py + dy;
            if (!m.contains(nx, ny)) continue;
            std::size_t const j = m.index(nx, ny);
            if (m.data[j] && c.label[j] < 0) {
              c.label[j] = id;
              stack.push_back(j);
            }
          }
        }
      }
    }
  }
  return c;
}

inline Components label_components(LevelSetField const& f) { return label_components(f.mask()); }

//! Moves grid points of components smaller than min_cells outside the region.
//! Returns the number of components removed.
inline std::size_t remove_small_components(LevelSetField& f, Components const& c, std::size_t min_cells) {
  std::size_t removed = 0;
  std::vector<bool> drop(c.sizes.size(), false);
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    if (c.sizes[k] < min_cells) {
      drop[k] = true;
      ++removed;
    }
  }
  if (removed == 0) return 0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (c.label[i] >= 0 && drop[static_cast<std::size_t>(c.label[i])]) f.values[i] = 0.5;
  return removed;
}

}  // namespace goc

#endif  // GOC_LEVELSET_HPP_
