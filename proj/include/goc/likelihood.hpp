#ifndef GOC_LIKELIHOOD_HPP_
#define GOC_LIKELIHOOD_HPP_

// Gaussian interior/background image model with a boundary gradient term.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "goc/errors.hpp"
#include "goc/image.hpp"

namespace goc {

//! sigma or sigma_bar may be infinite, which switches that Gaussian term off.
struct LikelihoodParams {
  double mu = 1.0;
  double sigma = 1.0;
  double mu_bar = 0.0;
  double sigma_bar = 1.0;
  double lambda_i = 0.0;

  void validate() const {
    if (!(sigma > 0.0) || !(sigma_bar > 0.0))
      throw std::invalid_argument("likelihood: sigma and sigma_bar must be positive");
    if (!(lambda_i >= 0.0)) throw std::invalid_argument("likelihood: lambda_i must be non-negative");
    if (!std::isfinite(mu) || !std::isfinite(mu_bar))
      throw std::invalid_argument("likelihood: mu and mu_bar must be finite");
  }

  //! +1 for bright objects on a dark background, -1 otherwise. The gradient
  //! term rewards boundaries whose image gradient points from object to
  //! background intensity.
  double polarity() const { return mu >= mu_bar ? 1.0 : -1.0; }
};

struct ClassStats {
  double mu = 0.0;
  double sigma = 0.0;
  double mu_bar = 0.0;
  double sigma_bar = 0.0;
};

inline constexpr std::size_t kMinClassPixels = 16;
inline constexpr double kMinSigma = 1e-9;

//! Mean and population standard deviation of the image inside and outside the mask.
inline ClassStats fit(ImageGrid const& img, Mask const& mask) {
  if (img.width != mask.width || img.height != mask.height)
    throw std::invalid_argument("fit: image and mask sizes differ");
  double s[2] = {0, 0};
  double n[2] = {0, 0};
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    int const c = mask.data[i] ? 0 : 1;
    s[c] += img.values[i];
    n[c] += 1;
  }
  for (int c = 0; c < 2; ++c) {
    if (n[c] < kMinClassPixels) {
      std::ostringstream ss;
      ss << (c == 0 ? "interior" : "background") << " class has only " << n[c] << " pixels";
      throw DegenerateClass(ss.str());
    }
  }
  double const m[2] = {s[0] / n[0], s[1] / n[1]};
  double v[2] = {0, 0};
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    int const c = mask.data[i] ? 0 : 1;
    double const d = img.values[i] - m[c];
    v[c] += d * d;
  }
  ClassStats st{m[0], std::sqrt(v[0] / n[0]), m[1], std::sqrt(v[1] / n[1])};
  // Rounding leaves ~1e-17 of spread in a constant class.
  if (!(st.sigma > kMinSigma) || !(st.sigma_bar > kMinSigma)) throw DegenerateClass("a class has zero variance");
  return st;
}

inline LikelihoodParams to_params(ClassStats const& s, double lambda_i = 0.0) {
  return {s.mu, s.sigma, s.mu_bar, s.sigma_bar, lambda_i};
}

struct LikelihoodTerms {
  double interior_nll = 0.0;
  double background_nll = 0.0;
  double gradient_term = 0.0;
};

namespace detail {

inline double gaussian_nll(double v, double mu, double sigma) {
  if (std::isinf(sigma)) return 0.0;
  double const d = v - mu;
  return d * d / (2.0 * sigma * sigma);
}

}  // namespace detail

//! Image values are clamped to [0, 1] before use.
inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

//! The gradient term is the outward flux of the image gradient through the
//! pixel faces separating region from background, times lambda_i and the
//! likelihood polarity. With the reflecting boundary this equals
//! lambda_i * pol * sum over the region of the 5-point Laplacian.
inline LikelihoodTerms energy_terms(ImageGrid const& img, Mask const& mask, LikelihoodParams const& lik) {
  if (img.width != mask.width || img.height != mask.height)
    throw std::invalid_argument("energy_terms: image and mask sizes differ");
  LikelihoodTerms t;
  double flux = 0.0;
  static constexpr int dx[4] = {1, -1, 0, 0};
  static constexpr int dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double const v = clamp_unit(img.at(x, y));
      if (mask.at(x, y)) {
        t.interior_nll += detail::gaussian_nll(v, lik.mu, lik.sigma);
        for (int k = 0; k < 4; ++k) {
          int const nx = x + dx[k];
          int const ny = y + dy[k];
          if (!mask.contains(nx, ny) || mask.at(nx, ny)) continue;
          flux += clamp_unit(img.at(nx, ny)) - v;
        }
      } else {
        t.background_nll += detail::gaussian_nll(v, lik.mu_bar, lik.sigma_bar);
      }
    }
  }
  t.gradient_term = lik.lambda_i == 0.0 ? 0.0 : lik.lambda_i * lik.polarity() * flux;
  return t;
}

}  // namespace goc

#endif  // GOC_LIKELIHOOD_HPP_
