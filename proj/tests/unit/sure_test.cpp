#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "patchprior/errors.hpp"
#include "patchprior/sure.hpp"
#include "test_support.hpp"

namespace pp = patchprior;

namespace {

// 3x3 mean filter with periodic borders, so every output pixel weighs its own
// input by exactly 1/9.
pp::ImageBuffer box3(const pp::ImageBuffer& img) {
  const std::size_t w = img.width(), h = img.height();
  pp::ImageBuffer out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) acc += img.at((r + h + i - 1) % h, (c + w + j - 1) % w);
      }
      out.at(r, c) = acc / 9.0;
    }
  }
  return out;
}

pp::ImageBuffer gradient(std::size_t w, std::size_t h) {
  pp::ImageBuffer img(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) img.at(r, c) = 40.0 + 0.5 * static_cast<double>(r + c);
  }
  return img;
}

}  // namespace

TEST(Sure, IdentityDenoiserEstimatesNoiseVariance) {
  const auto y = pp::add_gaussian_noise(gradient(256, 256), 20.0, 1);
  const auto est = pp::monte_carlo_sure(y, 20.0, [](const pp::ImageBuffer& x) { return x; });
  const double n = static_cast<double>(y.size());
  EXPECT_EQ(est.residual_mse, 0.0);
  EXPECT_NEAR(est.divergence / n, 1.0, 0.02);
  EXPECT_NEAR(est.raw, -400.0 + 800.0 * est.divergence / n, 1e-9);
  EXPECT_NEAR(est.raw, 400.0, 0.02 * 400.0);
}

TEST(Sure, ConstantDenoiserConcentratesNearZero) {
  const auto clean = gradient(64, 64);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto y = pp::add_gaussian_noise(clean, 15.0, seed);
    const auto est = pp::monte_carlo_sure(y, 15.0, [&](const pp::ImageBuffer&) { return clean; },
                                          {0.01, seed, -std::numeric_limits<double>::infinity(), 1});
    EXPECT_EQ(est.divergence, 0.0);
    total += est.raw;
  }
  EXPECT_LE(std::abs(total / 20.0), 0.1 * 225.0);
}

TEST(Sure, LinearFilterDivergenceMatchesTrace) {
  const auto y = pp::add_gaussian_noise(gradient(256, 256), 25.0, 2);
  pp::SureConfig config;
  config.probes = 20;
  config.seed = 9;
  const auto est = pp::monte_carlo_sure(y, 25.0, box3, config);
  const double analytic = static_cast<double>(y.size()) / 9.0;
  EXPECT_NEAR(est.divergence, analytic, 0.02 * analytic);
}

TEST(Sure, DeterministicPerSeed) {
  const auto y = pp::add_gaussian_noise(gradient(64, 64), 10.0, 3);
  pp::SureConfig config;
  config.seed = 4;
  const auto a = pp::monte_carlo_sure(y, 10.0, box3, config);
  const auto b = pp::monte_carlo_sure(y, 10.0, box3, config);
  EXPECT_EQ(a.raw, b.raw);
  config.seed = 5;
  EXPECT_NE(pp::monte_carlo_sure(y, 10.0, box3, config).raw, a.raw);
}

TEST(Sure, FloorBoundsResult) {
  const auto clean = gradient(64, 64);
  const auto y = pp::add_gaussian_noise(clean, 10.0, 6);
  pp::SureConfig config;
  config.floor = 1e6;
  EXPECT_EQ(pp::estimate_sigma_tilde_sq(y, 10.0, box3, config), 1e6);
  config.floor = 1.0;
  EXPECT_GE(pp::estimate_sigma_tilde_sq(y, 10.0, [&](const pp::ImageBuffer&) { return clean; }, config),
            1.0);
}

TEST(Sure, RejectsBadDenoiserOutput) {
  const auto y = gradient(16, 16);
  EXPECT_THROW(pp::monte_carlo_sure(y, 5.0, [](const pp::ImageBuffer&) { return pp::ImageBuffer(8, 8); }),
               pp::DimensionMismatch);
  EXPECT_THROW(pp::monte_carlo_sure(y, 5.0,
                                    [](const pp::ImageBuffer& x) {
                                      auto out = x;
                                      out[0] = std::numeric_limits<double>::infinity();
                                      return out;
                                    }),
               pp::NumericalFailure);
  EXPECT_THROW(pp::monte_carlo_sure(y, 0.0, box3), pp::InvalidArgument);
}
