#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchprior/gmm.hpp"

namespace patchprior {

enum class EmInit { kmeans_plus_plus, random_responsibility };

struct EmConfig {
  std::size_t components = 1;
  std::size_t max_iters = 100;
  double tol = 1e-5;  // relative change of the mean log-likelihood
  std::uint64_t seed = 0;
  EmInit init = EmInit::kmeans_plus_plus;
  double psd_floor = kDefaultPsdFloor;
};

struct EmResult {
  Gmm model;
  /// Log-likelihood of the data under the model entering each E-step.
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
  bool converged = false;
  /// One entry per component that lost all its mass and was reseeded.
  std::vector<std::string> events;
};

/// Maximum-likelihood mixture fit by expectation-maximization.
EmResult em_fit(const PatchSet& patches, const EmConfig& config);

/// EM on observations corrupted by N(0, sigma_tilde_sq I): the E-step uses
/// Sigma_k + sigma_tilde_sq I and the M-step removes sigma_tilde_sq I from the
/// scatter before flooring.
EmResult em_fit_with_inflation(const PatchSet& patches, const EmConfig& config,
                               double sigma_tilde_sq);

/// The maximum-likelihood M-step: pi_k = n_k / n, mu_k = mu_bar_k and
/// Sigma_k = floor(S_k / n_k - sigma_tilde_sq I). Components with n_k == 0
/// keep the parameters of `fallback`.
Gmm ml_mstep(const SufficientStats& stats, const Gmm& fallback, double psd_floor,
             double sigma_tilde_sq = 0.0);

}  // namespace patchprior
