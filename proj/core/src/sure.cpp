#include "patchprior/sure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "patchprior/errors.hpp"

namespace patchprior {

namespace {

ImageBuffer checked_call(const Denoiser& denoiser, const ImageBuffer& input) {
  ImageBuffer out = denoiser(input);
  if (!out.same_shape(input)) throw DimensionMismatch("denoiser changed the image shape");
  return out;
}

}  // namespace

SureEstimate monte_carlo_sure(const ImageBuffer& noisy, double sigma, const Denoiser& denoiser,
                              const SureConfig& config) {
  if (!(sigma > 0.0)) throw InvalidArgument("SURE needs sigma > 0");
  if (!(config.delta > 0.0)) throw InvalidArgument("SURE probe amplitude must be > 0");
  if (config.probes == 0) throw InvalidArgument("SURE needs at least one probe");
  if (noisy.empty()) throw InvalidArgument("SURE on an empty image");

  const ImageBuffer filtered = checked_call(denoiser, noisy);
  const double n = static_cast<double>(noisy.size());

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double divergence = 0.0;
  for (std::size_t probe = 0; probe < config.probes; ++probe) {
    std::vector<double> b(noisy.size());
    ImageBuffer perturbed = noisy;
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = normal(rng);
      perturbed[i] += config.delta * b[i];
    }
    const ImageBuffer filtered_perturbed = checked_call(denoiser, perturbed);
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) acc += b[i] * (filtered_perturbed[i] - filtered[i]);
    divergence += acc / config.delta;
  }
  divergence /= static_cast<double>(config.probes);
  if (!std::isfinite(divergence)) throw NumericalFailure("SURE divergence is not finite");

  SureEstimate est;
  est.divergence = divergence;
  est.residual_mse = mse(noisy, filtered);
  est.raw = est.residual_mse - sigma * sigma + 2.0 * sigma * sigma * divergence / n;
  est.sigma_tilde_sq = std::max(config.floor, est.raw);
  return est;
}

double estimate_sigma_tilde_sq(const ImageBuffer& noisy, double sigma, const Denoiser& denoiser,
                               const SureConfig& config) {
  return monte_carlo_sure(noisy, sigma, denoiser, config).sigma_tilde_sq;
}

}  // namespace patchprior
