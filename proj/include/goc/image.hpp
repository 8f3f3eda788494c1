#ifndef GOC_IMAGE_HPP_
#define GOC_IMAGE_HPP_

// Scalar images, binary masks and 8-bit binary PGM (P5) input/output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "goc/errors.hpp"
#include "goc/geometry.hpp"

namespace goc {

//! Row-major scalar image; pixel (x, y) is column x, row y, centred at the
//! integer point (x, y).
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ImageGrid() = default;
  ImageGrid(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  double& at(int x, int y) { return values[index(x, y)]; }
  double at(int x, int y) const { return values[index(x, y)]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  //! Value with coordinates clamped to the frame (reflecting boundary to first order).
  double clamped(int x, int y) const {
    return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
  }

  //! Bilinear interpolation; points outside the frame take the nearest edge value.
  double sample(Vec2 const& p) const {
    double const x = std::clamp(p.x, 0.0, static_cast<double>(width - 1));
    double const y = std::clamp(p.y, 0.0, static_cast<double>(height - 1));
    int const x0 = std::min(static_cast<int>(x), width - 2 < 0 ? 0 : width - 2);
    int const y0 = std::min(static_cast<int>(y), height - 2 < 0 ? 0 : height - 2);
    int const x1 = std::min(x0 + 1, width - 1);
    int const y1 = std::min(y0 + 1, height - 1);
    double const fx = x - x0;
    double const fy = y - y0;
    return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) +
           fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1));
  }

  void validate() const {
    if (width < 8 || height < 8) throw std::invalid_argument("image must be at least 8x8");
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw std::invalid_argument("image buffer size does not match its dimensions");
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("image has non-finite values");
  }
};

//! Binary region mask, 1 = region.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  bool at(int x, int y) const { return data[index(x, y)] != 0; }
  void set(int x, int y, bool v) { data[index(x, y)] = v ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(data.begin(), data.end(), [](auto v) { return v != 0; }));
  }
  bool operator==(Mask const& o) const {
    return width == o.width && height == o.height && data == o.data;
  }
};

//! Raw 8-bit PGM contents.
struct Pgm {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint8_t> pixels;
};

namespace detail {

inline void skip_pgm_space(std::istream& is) {
  for (;;) {
    int const c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      is.get();
    } else {
      return;
    }
  }
}

inline int read_pgm_int(std::istream& is) {
  skip_pgm_space(is);
  int v = -1;
  if (!(is >> v)) throw ParseError("malformed PGM header");
  return v;
}

}  // namespace detail

inline Pgm read_pgm(std::istream& is) {
  char magic[2] = {0, 0};
  is.read(magic, 2);
  if (!is || magic[0] != 'P' || magic[1] != '5') throw ParseError("not a binary PGM (P5) file");
  Pgm p;
  p.width = detail::read_pgm_int(is);
  p.height = detail::read_pgm_int(is);
  p.maxval = detail::read_pgm_int(is);
  if (p.width <= 0 || p.height <= 0) throw ParseError("PGM has non-positive dimensions");
  if (p.maxval <= 0 || p.maxval > 255) throw ParseError("only 8-bit PGM is supported");
  is.get();  // single whitespace byte before the raster
  p.pixels.resize(static_cast<std::size_t>(p.width) * static_cast<std::size_t>(p.height));
  is.read(reinterpret_cast<char*>(p.pixels.data()), static_cast<std::streamsize>(p.pixels.size()));
  if (is.gcount() != static_cast<std::streamsize>(p.pixels.size())) throw ParseError("truncated PGM raster");
  return p;
}

inline Pgm read_pgm(std::string const& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_pgm(is);
}

//! comment, if not empty, is written as a "# ..." line after the magic number.
inline void write_pgm(std::ostream& os, Pgm const& p, std::string const& comment = {}) {
  os << "P5\n";
  if (!comment.empty()) os << "# " << comment << '\n';
  os << p.width << ' ' << p.height << '\n' << p.maxval << '\n';
  os.write(reinterpret_cast<char const*>(p.pixels.data()), static_cast<std::streamsize>(p.pixels.size()));
}

inline void write_pgm(std::string const& path, Pgm const& p, std::string const& comment = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  write_pgm(os, p, comment);
  if (!os) throw IoError("write failed for " + path);
}

//! Image values are pixel / maxval.
inline ImageGrid to_image(Pgm const& p) {
  ImageGrid img(p.width, p.height);
  for (std::size_t i = 0; i < p.pixels.size(); ++i) img.values[i] = p.pixels[i] / static_cast<double>(p.maxval);
  return img;
}

//! Values clamped to [0, 1] and rounded to 8 bits.
inline Pgm to_pgm(ImageGrid const& img) {
  Pgm p{img.width, img.height, 255, {}};
  p.pixels.resize(img.values.size());
  for (std::size_t i = 0; i < img.values.size(); ++i)
    p.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(img.values[i], 0.0, 1.0)));
  return p;
}

//! Pixels at or above half of maxval are region.
inline Mask to_mask(Pgm const& p) {
  Mask m(p.width, p.height);
  for (std::size_t i = 0; i < p.pixels.size(); ++i) m.data[i] = 2 * p.pixels[i] >= p.maxval ? 1 : 0;
  return m;
}

inline Pgm to_pgm(Mask const& m) {
  Pgm p{m.width, m.height, 255, {}};
  p.pixels.resize(m.data.size());
  for (std::size_t i = 0; i < m.data.size(); ++i) p.pixels[i] = m.data[i] ? 255 : 0;
  return p;
}

//! 5-point Laplacian with a reflecting (zero-flux) boundary.
inline ImageGrid laplacian(ImageGrid const& img) {
  ImageGrid out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double const c = img.at(x, y);
      out.at(x, y) = img.clamped(x - 1, y) + img.clamped(x + 1, y) + img.clamped(x, y - 1) +
                     img.clamped(x, y + 1) - 4.0 * c;
    }
  }
  return out;
}

//! Affine map of the values onto [0, 1] (min to 0, max to 1).
inline ImageGrid rescale_unit(ImageGrid img) {
  if (img.values.empty()) return img;
  auto const [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
  double const a = *lo, span = *hi - *lo;
  if (span <= 0.0) throw ConstantImage("cannot rescale a constant image");
  for (double& v : img.values) v = (v - a) / span;
  return img;
}

//! Copy of img surrounded by `pad` pixels of the given value.
inline ImageGrid pad_image(ImageGrid const& img, int pad, double value) {
  ImageGrid out(img.width + 2 * pad, img.height + 2 * pad, value);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(x + pad, y + pad) = img.at(x, y);
  return out;
}

inline Mask crop_mask(Mask const& m, int pad, int width, int height) {
  Mask out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.set(x, y, m.at(x + pad, y + pad));
  return out;
}

}  // namespace goc

#endif  // GOC_IMAGE_HPP_
