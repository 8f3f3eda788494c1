#ifndef GOC_FORCES_HPP_
#define GOC_FORCES_HPP_

// Normal speeds (positive = outward) of the gradient descent on E_i + E_g.

#include <cmath>
#include <vector>

#include "goc/boundary.hpp"
#include "goc/image.hpp"
#include "goc/interaction.hpp"
#include "goc/likelihood.hpp"
#include "goc/stability.hpp"

namespace goc {

namespace detail {

//! Uniform bucket grid over sample positions.
class SampleBuckets {
 public:
  SampleBuckets(std::vector<BoundarySample> const& s, double cell) : cell_(cell) {
    if (s.empty()) return;
    lo_ = hi_ = s[0].position;
    for (auto const& p : s) {
      lo_.x = std::min(lo_.x, p.position.x);
      lo_.y = std::min(lo_.y, p.position.y);
      hi_.x = std::max(hi_.x, p.position.x);
      hi_.y = std::max(hi_.y, p.position.y);
    }
    nx_ = static_cast<int>((hi_.x - lo_.x) / cell_) + 1;
    ny_ = static_cast<int>((hi_.y - lo_.y) / cell_) + 1;
    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    std::vector<int> b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      b[i] = bucket(s[i].position);
      ++start_[static_cast<std::size_t>(b[i]) + 1];
    }
    for (std::size_t k = 1; k < start_.size(); ++k) start_[k] += start_[k - 1];
    items_.resize(s.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < s.size(); ++i) items_[fill[static_cast<std::size_t>(b[i])]++] = i;
  }

  //! Calls fn(j) for every sample in the 3x3 buckets around p.
  template <typename Fn>
  void near(Vec2 p, Fn&& fn) const {
    if (items_.empty()) return;
    int const cx = static_cast<int>((p.x - lo_.x) / cell_);
    int const cy = static_cast<int>((p.y - lo_.y) / cell_);
    for (int by = std::max(cy - 1, 0); by <= std::min(cy + 1, ny_ - 1); ++by) {
      for (int bx = std::max(cx - 1, 0); bx <= std::min(cx + 1, nx_ - 1); ++bx) {
        std::size_t const k = static_cast<std::size_t>(by * nx_ + bx);
        for (std::size_t q = start_[k]; q < start_[k + 1]; ++q) fn(items_[q]);
      }
    }
  }

 private:
  int bucket(Vec2 p) const {
    int const cx = static_cast<int>((p.x - lo_.x) / cell_);
    int const cy = static_cast<int>((p.y - lo_.y) / cell_);
    return cy * nx_ + cx;
  }

  double cell_;
  Vec2 lo_, hi_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

}  // namespace detail

//! beta * sum_j Rhat_ij . n_j Phi'(R_ij) over all samples j of every curve.
inline std::vector<double> nonlocal_force(std::vector<BoundarySample> const& s, PriorParams const& p) {
  std::vector<double> out(s.size(), 0.0);
  if (p.beta_c == 0.0 || s.empty()) return out;
  auto const ip = p.interaction();
  double const cut = ip.support();
  double const cut2 = cut * cut;
  double const inner2 = (ip.d - ip.epsilon) * (ip.d - ip.epsilon);
  detail::SampleBuckets const buckets(s, cut);
  for (std::size_t i = 0; i < s.size(); ++i) {
    Vec2 const xi = s[i].position;
    double acc = 0.0;
    buckets.near(xi, [&](std::size_t j) {
      if (j == i) return;
      Vec2 const r = xi - s[j].position;
      double const r2 = norm2(r);
      if (r2 >= cut2 || r2 <= inner2) return;
      double const rr = std::sqrt(r2);
      acc += dot(r, s[j].outward_normal) / rr * phi_prime(rr, ip);
    });
    out[i] = p.beta_c * acc;
  }
  return out;
}

//! -lambda kappa - alpha + the nonlocal term.
inline std::vector<double> prior_force(std::vector<BoundarySample> const& s, PriorParams const& p) {
  auto out = nonlocal_force(s, p);
  for (std::size_t i = 0; i < s.size(); ++i) out[i] += -p.lambda_c * s[i].curvature - p.alpha_c;
  return out;
}

//! Image with its Laplacian, ready for sampling along the boundary.
struct DataTerm {
  ImageGrid image;
  ImageGrid lap;
  LikelihoodParams lik;

  DataTerm(ImageGrid img, LikelihoodParams l) : image(std::move(img)), lik(l) {
    lik.validate();
    for (double& v : image.values) v = clamp_unit(v);
    lap = laplacian(image);
  }

  double at(Vec2 p) const {
    double const v = image.sample(p);
    double f = detail::gaussian_nll(v, lik.mu_bar, lik.sigma_bar) - detail::gaussian_nll(v, lik.mu, lik.sigma);
    if (lik.lambda_i != 0.0) f -= lik.lambda_i * lik.polarity() * lap.sample(p);
    return f;
  }
};

//! -lambda_i pol Lap I - (I - mu)^2 / 2 sigma^2 + (I - mu_bar)^2 / 2 sigma_bar^2.
inline std::vector<double> data_force(std::vector<BoundarySample> const& s, DataTerm const& data) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = data.at(s[i].position);
  return out;
}

inline std::vector<double> data_force(std::vector<BoundarySample> const& s, ImageGrid const& image,
                                      LikelihoodParams const& lik) {
  return data_force(s, DataTerm(image, lik));
}

}  // namespace goc

#endif  // GOC_FORCES_HPP_
