#ifndef GOC_SYNTHBENCH_HPP_
#define GOC_SYNTHBENCH_HPP_

// Synthetic test scenes (random circle fields, dumbbells) and detection scoring.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"
#include "goc/image.hpp"
#include "goc/levelset.hpp"

namespace goc {

struct TruthCircle {
  Vec2 center;
  double radius = 0.0;
};

struct SceneTruth {
  int width = 0;
  int height = 0;
  double foreground = 0.9;
  double background = 0.1;
  std::vector<TruthCircle> circles;
};

//! Pixel (x, y) belongs to a disc when its centre lies in the closed disc.
inline bool in_disc(TruthCircle const& c, int x, int y) {
  double const dx = x - c.center.x, dy = y - c.center.y;
  return dx * dx + dy * dy <= c.radius * c.radius;
}

inline Mask rasterize(SceneTruth const& t, std::vector<TruthCircle> const& circles) {
  Mask m(t.width, t.height);
  for (auto const& c : circles) {
    int const x0 = std::max(0, static_cast<int>(std::floor(c.center.x - c.radius)));
    int const x1 = std::min(t.width - 1, static_cast<int>(std::ceil(c.center.x + c.radius)));
    int const y0 = std::max(0, static_cast<int>(std::floor(c.center.y - c.radius)));
    int const y1 = std::min(t.height - 1, static_cast<int>(std::ceil(c.center.y + c.radius)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (in_disc(c, x, y)) m.set(x, y, true);
  }
  return m;
}

inline Mask rasterize(SceneTruth const& t) { return rasterize(t, t.circles); }

struct CircleSceneOptions {
  int size = 128;
  int n_big = 10;
  double r_big = 8.0;
  int n_small = 10;
  double r_small = 3.5;
  double foreground = 0.9;
  double background = 0.1;
  //! Minimum empty space between two discs, in pixels.
  double min_gap = 2.0;
  long max_rejections = 100000;
};

//! Random non-overlapping discs, big ones placed first, all inside the frame.
inline std::pair<ImageGrid, SceneTruth> gen_circles(std::uint64_t seed, CircleSceneOptions const& o = {}) {
  if (o.size < 8) throw std::invalid_argument("gen_circles: size must be at least 8");
  if (o.n_big < 0 || o.n_small < 0 || !(o.r_big > 0.0) || !(o.r_small > 0.0))
    throw std::invalid_argument("gen_circles: counts must be non-negative and radii positive");
  if (!(o.min_gap >= 0.0)) throw std::invalid_argument("gen_circles: min_gap must be non-negative");
  SceneTruth t{o.size, o.size, o.foreground, o.background, {}};
  boost::random::mt19937_64 rng(seed);
  long rejections = 0;
  auto place = [&](double r) {
    if (2.0 * r > o.size - 1) throw PlacementFailed("gen_circles: radius does not fit in the frame");
    boost::random::uniform_real_distribution<double> u(r, o.size - 1 - r);
    for (;;) {
      TruthCircle const c{{u(rng), u(rng)}, r};
      bool ok = true;
      for (auto const& e : t.circles) {
        if (norm(c.center - e.center) <= c.radius + e.radius + o.min_gap) {
          ok = false;
          break;
        }
      }
      if (ok) {
        t.circles.push_back(c);
        return;
      }
      if (++rejections > o.max_rejections) throw PlacementFailed("gen_circles: too many rejected placements");
    }
  };
  for (int i = 0; i < o.n_big; ++i) place(o.r_big);
  for (int i = 0; i < o.n_small; ++i) place(o.r_small);

  ImageGrid img(o.size, o.size, o.background);
  Mask const m = rasterize(t);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    if (m.data[i]) img.values[i] = o.foreground;
  return {img, t};
}

//! Population variance of the pixel values.
inline double variance(ImageGrid const& img) {
  double m = 0.0;
  for (double v : img.values) m += v;
  m /= static_cast<double>(img.values.size());
  double s = 0.0;
  for (double v : img.values) s += (v - m) * (v - m);
  return s / static_cast<double>(img.values.size());
}

//! Adds white Gaussian noise of power var(image) / 10^(snr_db / 10).
inline ImageGrid add_noise(ImageGrid img, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("add_noise: snr_db must be finite");
  double const var = variance(img);
  if (!(var > 0.0)) throw ConstantImage("add_noise: image is constant");
  double const sd = std::sqrt(var / std::pow(10.0, snr_db / 10.0));
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> n(0.0, sd);
  for (double& v : img.values) v += n(rng);
  return img;
}

//! 10 log10(var(clean) / mean squared difference).
inline double measured_snr_db(ImageGrid const& clean, ImageGrid const& noisy) {
  double s = 0.0;
  for (std::size_t i = 0; i < clean.values.size(); ++i) {
    double const d = noisy.values[i] - clean.values[i];
    s += d * d;
  }
  return 10.0 * std::log10(variance(clean) / (s / static_cast<double>(clean.values.size())));
}

//! Noise seed of scene `scene` at level `snr_index`, so every noisy image of a batch is reproducible on its own.
inline std::uint64_t noise_seed(std::uint64_t seed, int scene, int snr_index) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(scene + 1)) ^
                    (0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(snr_index + 1));
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  return x;
}

struct DumbbellOptions {
  std::vector<double> bar_levels = {48, 68, 88, 108, 128};
  double bell_radius = 8.0;
  double bell_level = 0.0;
  double background_level = 255.0;
  //! Distance between the two bell centres, in bell radii.
  double separation = 3.0;
  //! Bar thickness, in bell radii.
  double bar_width = 0.5;
  int width = 48;
  int height = 32;
};

//! One image per bar level: two dark bells joined by a horizontal bar on a
//! bright background, 8-bit levels divided by 255.
inline std::vector<std::pair<ImageGrid, SceneTruth>> gen_dumbbell(DumbbellOptions const& o = {}) {
  double const r = o.bell_radius;
  if (!(r > 0.0) || !(o.separation * r > 2.0 * r) || !(o.bar_width > 0.0))
    throw std::invalid_argument("gen_dumbbell: bells must be separated and have positive size");
  if (o.separation * r + 2.0 * r >= o.width - 2 || 2.0 * r >= o.height - 2)
    throw std::invalid_argument("gen_dumbbell: image too small for the dumbbell");
  // An even bar thickness in pixels is centred between two rows.
  double const cy = 0.5 * (o.height - 1);
  double const cx = 0.5 * (o.width - 1);
  double const half = 0.5 * o.separation * r;
  TruthCircle const a{{cx - half, cy}, r}, b{{cx + half, cy}, r};
  std::vector<std::pair<ImageGrid, SceneTruth>> out;
  for (double level : o.bar_levels) {
    SceneTruth t{o.width, o.height, o.bell_level / 255.0, o.background_level / 255.0, {a, b}};
    ImageGrid img(o.width, o.height, o.background_level / 255.0);
    for (int y = 0; y < o.height; ++y) {
      for (int x = 0; x < o.width; ++x) {
        if (in_disc(a, x, y) || in_disc(b, x, y))
          img.at(x, y) = o.bell_level / 255.0;
        else if (std::abs(y - cy) < 0.5 * o.bar_width * r && x > a.center.x && x < b.center.x)
          img.at(x, y) = level / 255.0;
      }
    }
    out.emplace_back(std::move(img), std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring.

enum class ComponentKind { correct, joined, false_positive, unmatched };

inline char const* to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::correct: return "correct";
    case ComponentKind::joined: return "joined";
    case ComponentKind::false_positive: return "false_positive";
    case ComponentKind::unmatched: return "unmatched";
  }
  return "?";
}

struct ComponentMatch {
  int component = 0;
  std::size_t pixels = 0;
  ComponentKind kind = ComponentKind::unmatched;
  std::vector<std::size_t> truths;  // indices into SceneTruth::circles
  double iou = 0.0;
};

enum class TruthStatus { detected, missed, joined };

struct DetectionCounts {
  std::size_t targets = 0;
  std::size_t cd = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t joined = 0;

  DetectionCounts& operator+=(DetectionCounts const& o) {
    targets += o.targets;
    cd += o.cd;
    fp += o.fp;
    fn += o.fn;
    joined += o.joined;
    return *this;
  }
};

struct DetectionReport {
  DetectionCounts counts;
  double cd_percent = 0.0;
  double fp_percent = 0.0;
  double fn_percent = 0.0;
  double joined_percent = 0.0;
  std::vector<ComponentMatch> matches;
  //! Status of every circle of radius r_target, indexed like SceneTruth::circles
  //! (other circles are reported as missed but never counted).
  std::vector<TruthStatus> truth_status;
};

inline DetectionReport make_report(DetectionCounts const& c) {
  DetectionReport r;
  r.counts = c;
  double const n = c.targets ? static_cast<double>(c.targets) : 1.0;
  r.cd_percent = 100.0 * static_cast<double>(c.cd) / n;
  r.fp_percent = 100.0 * static_cast<double>(c.fp) / n;
  r.fn_percent = 100.0 * static_cast<double>(c.fn) / n;
  r.joined_percent = 100.0 * static_cast<double>(c.joined) / n;
  return r;
}

//! Circles whose radius is within this distance of r_target are targets.
inline constexpr double kTargetRadiusTol = 1e-6;
inline constexpr double kMatchIoU = 0.5;

//! Scores a region mask against the truth. Components are 8-connected.
//! A truth centre is "contained" when the pixel nearest to it is in the component.
inline DetectionReport score(Mask const& result, SceneTruth const& truth, double r_target) {
  if (result.width != truth.width || result.height != truth.height)
    throw std::invalid_argument("score: mask and truth sizes differ");
  auto const comps = label_components(result, true);
  std::size_t const nc = truth.circles.size();
  std::vector<bool> target(nc);
  std::vector<int> comp_of(nc, -1);
  DetectionCounts c;
  for (std::size_t i = 0; i < nc; ++i) {
    auto const& tc = truth.circles[i];
    target[i] = std::abs(tc.radius - r_target) <= kTargetRadiusTol;
    if (target[i]) ++c.targets;
    int const x = static_cast<int>(std::lround(tc.center.x));
    int const y = static_cast<int>(std::lround(tc.center.y));
    if (result.contains(x, y)) comp_of[i] = comps.label[result.index(x, y)];
  }

  std::vector<TruthStatus> status(nc, TruthStatus::missed);
  std::vector<ComponentMatch> matches(comps.sizes.size());
  for (std::size_t k = 0; k < matches.size(); ++k) {
    matches[k].component = static_cast<int>(k);
    matches[k].pixels = comps.sizes[k];
  }
  for (std::size_t i = 0; i < nc; ++i)
    if (target[i] && comp_of[i] >= 0) matches[static_cast<std::size_t>(comp_of[i])].truths.push_back(i);

  for (auto& m : matches) {
    if (m.truths.empty()) {
      m.kind = ComponentKind::false_positive;
      ++c.fp;
    } else if (m.truths.size() >= 2) {
      m.kind = ComponentKind::joined;
      for (std::size_t i : m.truths) status[i] = TruthStatus::joined;
      c.joined += m.truths.size();
    } else {
      std::size_t const i = m.truths[0];
      Mask const disc = rasterize(truth, {truth.circles[i]});
      std::size_t inter = 0, uni = 0;
      for (std::size_t p = 0; p < disc.data.size(); ++p) {
        bool const a = comps.label[p] == m.component;
        bool const b = disc.data[p] != 0;
        inter += a && b;
        uni += a || b;
      }
      m.iou = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
      if (m.iou >= kMatchIoU) {
        m.kind = ComponentKind::correct;
        status[i] = TruthStatus::detected;
        ++c.cd;
      }
    }
  }
  for (std::size_t i = 0; i < nc; ++i)
    if (target[i] && status[i] == TruthStatus::missed) ++c.fn;

  DetectionReport r = make_report(c);
  r.matches = std::move(matches);
  r.truth_status = std::move(status);
  return r;
}

// ---------------------------------------------------------------------------
// CSV.

inline void write_truth_csv(std::ostream& os, SceneTruth const& t) {
  os << "cx,cy,r\n" << std::setprecision(12);
  for (auto const& c : t.circles) os << c.center.x << ',' << c.center.y << ',' << c.radius << '\n';
}

//! Reads `cx,cy,r` rows; lines starting with '#' are skipped. Only the circles are filled in.
inline SceneTruth read_truth_csv(std::istream& is) {
  SceneTruth t;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "cx,cy,r") throw ParseError("truth csv: expected header 'cx,cy,r'");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    TruthCircle c;
    char c1 = 0, c2 = 0;
    if (!(ss >> c.center.x >> c1 >> c.center.y >> c2 >> c.radius) || c1 != ',' || c2 != ',' || !(c.radius > 0.0))
      throw ParseError("truth csv: bad row at line " + std::to_string(lineno));
    t.circles.push_back(c);
  }
  if (!header) throw ParseError("truth csv: missing header");
  return t;
}

struct ReportRow {
  double snr_db = 0.0;
  DetectionReport report;
};

inline void write_report_csv(std::ostream& os, std::vector<ReportRow> const& rows) {
  os << "snr_db,cd,fp,fn,joined\n" << std::setprecision(12);
  for (auto const& r : rows)
    os << r.snr_db << ',' << r.report.cd_percent << ',' << r.report.fp_percent << ',' << r.report.fn_percent << ','
       << r.report.joined_percent << '\n';
}

}  // namespace goc

#endif  // GOC_SYNTHBENCH_HPP_
