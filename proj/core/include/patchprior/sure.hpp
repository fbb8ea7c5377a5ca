#pragma once

#include <cstdint>
#include <functional>

#include "patchprior/image.hpp"

namespace patchprior {

using Denoiser = std::function<ImageBuffer(const ImageBuffer&)>;

struct SureConfig {
  double delta = 0.01;  // probe amplitude
  std::uint64_t seed = 0;
  double floor = 1.0;   // minimum returned residual variance
  std::size_t probes = 1;
};

struct SureEstimate {
  double sigma_tilde_sq = 0.0;  // max(floor, raw)
  double raw = 0.0;             // unfloored SURE
  double divergence = 0.0;      // averaged over probes
  double residual_mse = 0.0;    // ||y - x_bar||^2 / n
};

/// Monte-Carlo SURE of the mean squared error of `denoiser` applied to y:
///   b ~ N(0, I), div = b^T (f(y + delta b) - f(y)) / delta
///   SURE = ||y - f(y)||^2 / n - sigma^2 + 2 sigma^2 div / n
/// With several probes the divergence estimates are averaged.
SureEstimate monte_carlo_sure(const ImageBuffer& noisy, double sigma, const Denoiser& denoiser,
                              const SureConfig& config = {});

double estimate_sigma_tilde_sq(const ImageBuffer& noisy, double sigma, const Denoiser& denoiser,
                               const SureConfig& config = {});

}  // namespace patchprior
