#pragma once

#include <vector>

#include "patchprior/gmm.hpp"

namespace patchprior {

struct AdaptationConfig {
  /// Relevance factor. 1 is the default; values between 1 and 10 work well for
  /// images over 200x200, and speaker verification traditionally uses 16.
  double rho = 1.0;
  /// Residual noise variance of the adaptation image on the [0, 255]^2 scale.
  double sigma_tilde_sq = 0.0;
  std::size_t iterations = 1;
  double psd_floor = kDefaultPsdFloor;
  bool fast_covariance = true;
};

struct AdaptationReport {
  /// log_posterior_objective after each iteration, under the hyper-prior
  /// derive_hyperparams(generic, rho) and inflation sigma_tilde_sq.
  std::vector<double> objective;
  Eigen::VectorXd alpha;   // final iteration
  Eigen::VectorXd counts;  // final iteration
  double mstep_seconds = 0.0;
};

struct AdaptationResult {
  Gmm model;
  AdaptationReport report;
};

/// Bayesian EM adaptation of a generic mixture to a sample. Each iteration runs
/// the E-step under the current estimate (generic on the first pass); the
/// M-step always blends with the original generic parameters:
///   alpha_k = n_k / (n_k + rho)
///   pi_k'   = alpha_k n_k / n + (1 - alpha_k) pi_k, renormalized
///   mu_k'   = alpha_k mu_bar_k + (1 - alpha_k) mu_k
///   Sigma_k' = floor(alpha_k (data scatter about mu_k' - sigma_tilde_sq I)
///                    + (1 - alpha_k)(Sigma_k + (mu_k - mu_k')(mu_k - mu_k')^T))
AdaptationResult adapt(const Gmm& generic, const PatchSet& patches,
                       const AdaptationConfig& config);

/// One adaptation M-step from precomputed statistics (no flooring of the
/// weights beyond renormalization; covariances floored).
Gmm adapt_mstep(const Gmm& generic, const SufficientStats& stats, double rho,
                double sigma_tilde_sq, double psd_floor, bool fast_covariance,
                const PatchSet* patches = nullptr, const Eigen::MatrixXd* gamma = nullptr);

/// Covariance update by direct summation over the patches:
///   alpha/n_k sum_i gamma_ki ((p_i - mu')(p_i - mu')^T - sigma_tilde_sq I)
///   + (1 - alpha)(Sigma_k + (mu_k - mu')(mu_k - mu')^T)
/// Unfloored. Requires n_k > 0.
Eigen::MatrixXd mstep_covariance_direct(const PatchSet& patches,
                                        const Eigen::Ref<const Eigen::VectorXd>& gamma_k,
                                        double n_k, const Eigen::VectorXd& mu_tilde,
                                        const Eigen::VectorXd& generic_mean,
                                        const Eigen::MatrixXd& generic_cov, double alpha,
                                        double sigma_tilde_sq = 0.0);

/// Same quantity from the precomputed second moment, with no access to patches:
///   alpha M2_k - mu' mu'^T + (1 - alpha)(Sigma_k + mu_k mu_k^T) - alpha sigma_tilde_sq I
/// Exact only when mu' = alpha mu_bar_k + (1 - alpha) mu_k.
Eigen::MatrixXd mstep_covariance_fast(const Eigen::MatrixXd& second_moment,
                                      const Eigen::VectorXd& mu_tilde,
                                      const Eigen::VectorXd& generic_mean,
                                      const Eigen::MatrixXd& generic_cov, double alpha,
                                      double sigma_tilde_sq = 0.0);

/// Conjugate posterior hyper-parameters after observing `stats`.
HyperParams posterior_hyperparams(const HyperParams& hyper, const SufficientStats& stats);

/// Maximizer of Q + log hyper-prior for arbitrary hyper-parameters. Unfloored.
Gmm mstep_general(const HyperParams& hyper, const SufficientStats& stats);

}  // namespace patchprior
