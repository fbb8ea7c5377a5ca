#pragma once

#include <optional>
#include <vector>

#include "patchprior/gmm.hpp"
#include "patchprior/image.hpp"

namespace patchprior {

/// Half-quadratic splitting schedule.
struct HqsSchedule {
  std::vector<double> betas;            // penalty per stage, > 0
  std::vector<double> mode_inflations;  // delta_j added to Sigma_k for mode selection
  /// Data-fidelity weight is data_weight / sigma^2. Zero selects the patch
  /// dimension d.
  double data_weight = 0.0;
};

/// beta_j = {1, 4, 8, 16, 32} / sigma^2 and delta_j = 1 / beta_j.
HqsSchedule default_schedule(double sigma);

/// beta_j = multipliers_j / sigma^2 and delta_j = 1 / beta_j.
HqsSchedule schedule_from_multipliers(double sigma, const std::vector<double>& multipliers);

struct DenoiseResult {
  ImageBuffer image;
  std::vector<double> psnr_trace;  // per stage; empty without a reference
  std::vector<std::vector<std::size_t>> mode_histograms;  // per stage, length K
};

/// MAP denoising with a mixture patch prior. Per stage, for every overlapping
/// patch (stride 1) of the current estimate x:
///   k* = argmax_k pi_k N(P_i x | mu_k, Sigma_k + delta I)
///   v_i = (beta Sigma_k* + I)^{-1} (mu_k* + beta Sigma_k* P_i x)
///   x   = (lambda y + beta sum_i P_i^T v_i) / (lambda + beta count)
/// with lambda = data_weight / sigma^2. x starts at y.
DenoiseResult denoise(const ImageBuffer& noisy, double sigma, const Gmm& prior,
                      const HqsSchedule& schedule,
                      const std::optional<ImageBuffer>& reference = std::nullopt);

/// Index of the most probable component for each column of `patches`.
std::vector<std::size_t> select_modes(const Gmm& prior, const PatchSet& patches,
                                      double inflation);

}  // namespace patchprior
