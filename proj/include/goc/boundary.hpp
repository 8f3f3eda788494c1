#ifndef GOC_BOUNDARY_HPP_
#define GOC_BOUNDARY_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"
#include "goc/levelset.hpp"

namespace goc {

//! Point of the discretised boundary. tangent is the derivative with respect
//! to the polyline parameter (one unit per vertex), so |tangent| is the local
//! arc length per sample and doubles as the quadrature weight.
struct BoundarySample {
  Vec2 position;
  Vec2 tangent;
  Vec2 outward_normal;
  double curvature = 0.0;
  int component = 0;
};

inline std::vector<BoundarySample> samples_from_polylines(std::vector<Polyline> const& lines,
                                                         ImageGrid const& kappa) {
  std::vector<BoundarySample> out;
  int comp = 0;
  for (auto const& pl : lines) {
    auto const& p = pl.points;
    std::size_t const n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
      BoundarySample s;
      s.position = p[i];
      s.tangent = 0.5 * (p[(i + 1) % n] - p[(i + n - 1) % n]);
      s.outward_normal = right_normal(s.tangent);
      s.curvature = kappa.sample(p[i]);
      s.component = comp;
      out.push_back(s);
    }
    ++comp;
  }
  return out;
}

//! Samples of every closed zero-level curve, one per crossed cell edge.
inline std::vector<BoundarySample> extract_boundary(LevelSetField const& f) {
  auto const lines = zero_level_polylines(f);
  if (lines.empty()) throw EmptyRegion("level set has no zero crossing");
  return samples_from_polylines(lines, curvature_grid(f));
}

}  // namespace goc

#endif  // GOC_BOUNDARY_HPP_
