#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "goc/image.hpp"
#include "goc/likelihood.hpp"

namespace {

using goc::ImageGrid;
using goc::LikelihoodParams;
using goc::Mask;

Mask box_mask(int w, int h, int x0, int y0, int x1, int y1) {
  Mask m(w, h);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) m.set(x, y, true);
  return m;
}

ImageGrid two_level(Mask const& m, double in, double out) {
  ImageGrid img(m.width, m.height);
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = m.data[i] ? in : out;
  return img;
}

ImageGrid smooth_image(int w, int h) {
  ImageGrid img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(x, y) = 0.5 + 0.2 * std::sin(0.11 * x) * std::cos(0.07 * y) + 0.1 * std::sin(0.05 * (x + y));
  return img;
}

TEST(Pgm, RoundTrip) {
  goc::Pgm p{5, 3, 255, {0, 1, 2, 3, 4, 50, 60, 70, 80, 90, 200, 210, 220, 230, 255}};
  std::stringstream ss;
  goc::write_pgm(ss, p, "a comment line");
  auto const q = goc::read_pgm(ss);
  EXPECT_EQ(q.width, 5);
  EXPECT_EQ(q.height, 3);
  EXPECT_EQ(q.pixels, p.pixels);
}

TEST(Pgm, RejectsBadInput) {
  std::stringstream a("P2\n2 2\n255\n0 0 0 0");
  EXPECT_THROW(goc::read_pgm(a), goc::ParseError);
  std::stringstream b("P5\n4 4\n255\nabc");
  EXPECT_THROW(goc::read_pgm(b), goc::ParseError);
  EXPECT_THROW(goc::read_pgm(std::string("/nonexistent/x.pgm")), goc::IoError);
}

TEST(Pgm, MaskThreshold) {
  Mask m = box_mask(10, 10, 2, 3, 6, 8);
  EXPECT_EQ(goc::to_mask(goc::to_pgm(m)), m);
}

TEST(Image, RescaleUnit) {
  ImageGrid img(8, 8, 2.0);
  img.at(1, 1) = -1.0;
  img.at(2, 2) = 5.0;
  auto const r = goc::rescale_unit(img);
  EXPECT_DOUBLE_EQ(*std::min_element(r.values.begin(), r.values.end()), 0.0);
  EXPECT_DOUBLE_EQ(*std::max_element(r.values.begin(), r.values.end()), 1.0);
  EXPECT_DOUBLE_EQ(r.at(0, 0), 0.5);
  EXPECT_THROW(goc::rescale_unit(ImageGrid(8, 8, 0.3)), goc::ConstantImage);
}

TEST(Fit, NoiselessTwoLevelIsDegenerate) {
  auto const m = box_mask(32, 32, 8, 8, 24, 24);
  EXPECT_THROW(goc::fit(two_level(m, 0.9, 0.1), m), goc::DegenerateClass);
}

TEST(Fit, TooFewPixels) {
  auto const m = box_mask(32, 32, 0, 0, 3, 5);  // 15 pixels
  ImageGrid img(32, 32);
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = 0.01 * static_cast<double>(i % 17);
  EXPECT_THROW(goc::fit(img, m), goc::DegenerateClass);
}

TEST(Fit, RecoversNoiseLevel) {
  auto const m = box_mask(128, 128, 20, 20, 90, 100);
  auto img = two_level(m, 0.9, 0.1);
  boost::random::mt19937_64 rng(11);
  boost::random::normal_distribution<double> g(0.0, 0.05);
  for (double& v : img.values) v += g(rng);
  auto const s = goc::fit(img, m);
  EXPECT_NEAR(s.mu, 0.9, 0.005);
  EXPECT_NEAR(s.mu_bar, 0.1, 0.005);
  EXPECT_NEAR(s.sigma, 0.05, 0.005);
  EXPECT_NEAR(s.sigma_bar, 0.05, 0.005);
}

TEST(Fit, InvariantUnderPixelPermutation) {
  auto const m = box_mask(40, 40, 5, 5, 25, 30);
  auto img = two_level(m, 0.7, 0.2);
  boost::random::mt19937_64 rng(5);
  boost::random::normal_distribution<double> g(0.0, 0.1);
  for (double& v : img.values) v += g(rng);
  // Reverse the pixel order of both image and mask.
  ImageGrid img2 = img;
  Mask m2 = m;
  std::reverse(img2.values.begin(), img2.values.end());
  std::reverse(m2.data.begin(), m2.data.end());
  auto const a = goc::fit(img, m), b = goc::fit(img2, m2);
  EXPECT_NEAR(a.mu, b.mu, 1e-12);
  EXPECT_NEAR(a.sigma, b.sigma, 1e-12);
  EXPECT_NEAR(a.mu_bar, b.mu_bar, 1e-12);
  EXPECT_NEAR(a.sigma_bar, b.sigma_bar, 1e-12);
}

TEST(Likelihood, ValidateRejectsBadParams) {
  EXPECT_THROW((LikelihoodParams{0.9, 0.0, 0.1, 0.1, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((LikelihoodParams{0.9, 0.1, 0.1, 0.1, -1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((LikelihoodParams{0.9, 0.1, 0.1, 0.1, 0.0}.validate()));
  EXPECT_EQ((LikelihoodParams{0.0, 1.0, 1.0, 1.0, 0.0}.polarity()), -1.0);
}

TEST(EnergyTerms, ExactClassValuesGiveZeroNll) {
  auto const m = box_mask(32, 32, 8, 8, 24, 24);
  auto const t = goc::energy_terms(two_level(m, 0.8, 0.3), m, {0.8, 0.1, 0.3, 0.1, 0.0});
  EXPECT_EQ(t.interior_nll, 0.0);
  EXPECT_EQ(t.background_nll, 0.0);
  EXPECT_EQ(t.gradient_term, 0.0);
}

TEST(EnergyTerms, GaussianSums) {
  auto const m = box_mask(16, 16, 4, 4, 8, 8);  // 16 pixels
  auto const t = goc::energy_terms(two_level(m, 0.6, 0.3), m, {0.8, 0.1, 0.1, 0.2, 0.0});
  EXPECT_NEAR(t.interior_nll, 16 * 0.04 / 0.02, 1e-9);
  EXPECT_NEAR(t.background_nll, 240 * 0.04 / 0.08, 1e-9);
}

TEST(EnergyTerms, FluxEqualsLaplacianSum) {
  auto const img = smooth_image(64, 64);
  Mask m(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) m.set(x, y, std::hypot(x - 30.0, y - 33.0) < 17.0);
  LikelihoodParams const lik{0.9, 0.1, 0.1, 0.1, 1.7};
  auto const lap = goc::laplacian(img);
  double sum = 0.0;
  for (std::size_t i = 0; i < m.data.size(); ++i)
    if (m.data[i]) sum += lap.values[i];
  double const flux = goc::energy_terms(img, m, lik).gradient_term;
  ASSERT_GT(std::abs(sum), 1e-3);
  EXPECT_NEAR(flux, lik.lambda_i * sum, 0.01 * std::abs(lik.lambda_i * sum));
}

TEST(EnergyTerms, AdditiveOverDisjointComponents) {
  auto const img = smooth_image(48, 48);
  auto const a = box_mask(48, 48, 4, 4, 16, 14);
  auto const b = box_mask(48, 48, 25, 20, 40, 41);
  Mask ab = a;
  for (std::size_t i = 0; i < ab.data.size(); ++i) ab.data[i] |= b.data[i];
  LikelihoodParams const lik{0.7, 0.2, 0.4, 0.1, 2.0};
  auto const ta = goc::energy_terms(img, a, lik), tb = goc::energy_terms(img, b, lik);
  auto const tab = goc::energy_terms(img, ab, lik);
  EXPECT_NEAR(tab.interior_nll, ta.interior_nll + tb.interior_nll, 1e-9);
  EXPECT_NEAR(tab.gradient_term, ta.gradient_term + tb.gradient_term, 1e-9);
}

}  // namespace
