#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "patchprior/patches.hpp"

namespace patchprior {

/// Eigenvalue floor applied to every covariance estimate, on the [0, 255]^2
/// variance scale.
inline constexpr double kDefaultPsdFloor = 1e-4;

/// K weighted full-covariance Gaussians over R^d.
struct Gmm {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;

  std::size_t num_components() const noexcept { return means.size(); }
  std::size_t dim() const noexcept {
    return means.empty() ? 0 : static_cast<std::size_t>(means.front().size());
  }
};

/// Throws DimensionMismatch / InvalidArgument when shapes are inconsistent,
/// weights leave the simplex (1e-12), a covariance is asymmetric (1e-12) or its
/// smallest eigenvalue is below psd_floor * (1 - 1e-9).
void validate(const Gmm& gmm, double psd_floor = kDefaultPsdFloor);

/// Nearest (Frobenius) symmetric matrix whose eigenvalues are all >= floor.
/// Symmetrizes first; returns the symmetrized input untouched when it already
/// satisfies the floor, so the operation is idempotent.
Eigen::MatrixXd condition_psd(const Eigen::MatrixXd& sigma, double floor = kDefaultPsdFloor);

/// Cholesky factor of sym(sigma) + inflation * I, reused for many evaluations.
class GaussianDensity {
 public:
  GaussianDensity(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                  double inflation = 0.0, std::size_t component = 0);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  double log_det() const noexcept { return log_det_; }

  double log_density(const Eigen::Ref<const Eigen::VectorXd>& p) const;
  /// Log-density of every column of `samples`.
  Eigen::VectorXd log_density_columns(const Eigen::MatrixXd& samples) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
  double log_norm_ = 0.0;  // -0.5 (d log 2pi + log det)
};

/// log N(p | mu, sigma + inflation * I) via a Cholesky factorization.
/// Throws IllConditionedCovariance when the factorization fails.
double log_gaussian(const Eigen::VectorXd& p, const Eigen::VectorXd& mu,
                    const Eigen::MatrixXd& sigma, double inflation = 0.0);

/// n x K matrix of log pi_k + log N(p_i | mu_k, Sigma_k + inflation * I).
Eigen::MatrixXd weighted_log_densities(const Gmm& gmm, const PatchSet& patches,
                                       double inflation = 0.0);

struct Responsibilities {
  Eigen::MatrixXd gamma;           // n x K, rows sum to one
  Eigen::VectorXd counts;          // n_k = sum_i gamma_ki
  Eigen::VectorXd log_likelihood;  // per patch, log sum_k pi_k N(p_i | ...)

  double total_log_likelihood() const { return log_likelihood.sum(); }
};

/// Posterior component memberships with the log-sum-exp guard. Throws
/// DegeneratePatch when a patch has -inf log-density under every component.
Responsibilities responsibilities(const Gmm& gmm, const PatchSet& patches,
                                  double inflation = 0.0);

/// Per-component sufficient statistics of a responsibility-weighted sample.
struct SufficientStats {
  double sample_count = 0.0;                  // n
  Eigen::VectorXd counts;                     // n_k
  std::vector<Eigen::VectorXd> means;         // mu_bar_k (zero when n_k == 0)
  std::vector<Eigen::MatrixXd> scatters;      // S_k = sum gamma (p - mu_bar)(p - mu_bar)^T
  std::vector<Eigen::MatrixXd> second_moments;  // sum gamma p p^T / n_k

  std::size_t num_components() const noexcept { return means.size(); }
};

SufficientStats sufficient_stats(const PatchSet& patches, const Eigen::MatrixXd& gamma);

/// Normal-inverse-Wishart x Dirichlet hyper-prior, one entry per component.
struct ComponentHyperParams {
  double pseudo_count = 1.0;      // v_k, Dirichlet
  Eigen::VectorXd prior_mean;     // vartheta_k
  double mean_strength = 1.0;     // tau_k
  Eigen::MatrixXd scale;          // Psi_k
  double dof = 0.0;               // phi_k
};

struct HyperParams {
  std::vector<ComponentHyperParams> components;
  std::size_t num_components() const noexcept { return components.size(); }
};

/// Hyper-parameters centred on a generic model with relevance factor rho:
/// vartheta_k = mu_k, tau_k = phi_k + d + 2 = rho, Psi_k = rho Sigma_k and
/// v_k = 1 + rho K pi_k, so that sum_k (v_k - 1) = rho K and the Dirichlet mode
/// is pi_k. For rho <= 2d + 1 the implied phi_k is below d - 1 and the prior is
/// used formally.
HyperParams derive_hyperparams(const Gmm& generic, double rho);

/// As above, but with Dirichlet pseudo-counts tied to the probabilistic counts
/// n_k, the way the relevance factor rho = (n_k / n)(sum v - K) couples them.
/// The resulting general M-step weights coincide with the normalized
/// relevance-weighted update alpha_k n_k / n + (1 - alpha_k) pi_k.
HyperParams derive_hyperparams(const Gmm& generic, double rho, const Eigen::VectorXd& counts);

/// Log of the hyper-prior density at `model`, up to an additive constant that
/// depends only on `hyper`.
double log_hyperprior(const Gmm& model, const HyperParams& hyper);

/// sum_i log sum_k pi_k N(p_i | mu_k, Sigma_k + inflation I).
double log_likelihood(const Gmm& model, const PatchSet& patches, double inflation = 0.0);

enum class PriorTerm { include, flat };

/// Data log-likelihood plus log hyper-prior (dropped under PriorTerm::flat).
double log_posterior_objective(const Gmm& model, const PatchSet& patches,
                               const HyperParams& hyper, double inflation = 0.0,
                               PriorTerm prior = PriorTerm::include);

}  // namespace patchprior
