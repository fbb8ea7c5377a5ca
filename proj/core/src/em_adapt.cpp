#include "patchprior/em_adapt.hpp"

#include <chrono>
#include <string>

#include "patchprior/errors.hpp"

namespace patchprior {

namespace {

Eigen::MatrixXd outer(const Eigen::VectorXd& v) { return v * v.transpose(); }

void check_stats(const Gmm& generic, const SufficientStats& stats) {
  if (stats.num_components() != generic.num_components()) {
    throw DimensionMismatch("statistics have " + std::to_string(stats.num_components()) +
                            " components, model has " +
                            std::to_string(generic.num_components()));
  }
}

}  // namespace

Eigen::MatrixXd mstep_covariance_direct(const PatchSet& patches,
                                        const Eigen::Ref<const Eigen::VectorXd>& gamma_k,
                                        double n_k, const Eigen::VectorXd& mu_tilde,
                                        const Eigen::VectorXd& generic_mean,
                                        const Eigen::MatrixXd& generic_cov, double alpha,
                                        double sigma_tilde_sq) {
  if (!(n_k > 0.0)) throw InvalidArgument("direct covariance update needs n_k > 0");
  const auto d = static_cast<Eigen::Index>(patches.dim());
  if (mu_tilde.size() != d || generic_mean.size() != d || generic_cov.rows() != d ||
      static_cast<std::size_t>(gamma_k.size()) != patches.count()) {
    throw DimensionMismatch("direct covariance update: inconsistent shapes");
  }
  Eigen::MatrixXd data_term = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd diff(d);
  for (std::size_t i = 0; i < patches.count(); ++i) {
    const double g = gamma_k[static_cast<Eigen::Index>(i)];
    diff = patches.patch(i) - mu_tilde;
    data_term.noalias() += g * diff * diff.transpose();
    data_term.diagonal().array() -= g * sigma_tilde_sq;
  }
  return alpha / n_k * data_term +
         (1.0 - alpha) * (generic_cov + outer(generic_mean - mu_tilde));
}

Eigen::MatrixXd mstep_covariance_fast(const Eigen::MatrixXd& second_moment,
                                      const Eigen::VectorXd& mu_tilde,
                                      const Eigen::VectorXd& generic_mean,
                                      const Eigen::MatrixXd& generic_cov, double alpha,
                                      double sigma_tilde_sq) {
  const auto d = mu_tilde.size();
  if (second_moment.rows() != d || second_moment.cols() != d || generic_mean.size() != d ||
      generic_cov.rows() != d || generic_cov.cols() != d) {
    throw DimensionMismatch("fast covariance update: inconsistent shapes");
  }
  Eigen::MatrixXd out = alpha * second_moment - outer(mu_tilde) +
                        (1.0 - alpha) * (generic_cov + outer(generic_mean));
  out.diagonal().array() -= alpha * sigma_tilde_sq;
  return out;
}

Gmm adapt_mstep(const Gmm& generic, const SufficientStats& stats, double rho,
                double sigma_tilde_sq, double psd_floor, bool fast_covariance,
                const PatchSet* patches, const Eigen::MatrixXd* gamma) {
  check_stats(generic, stats);
  if (!(rho > 0.0)) throw InvalidArgument("relevance factor rho must be > 0");
  if (!fast_covariance && (patches == nullptr || gamma == nullptr)) {
    throw InvalidArgument("direct covariance update needs the patches and responsibilities");
  }
  const std::size_t k = generic.num_components();
  const double n = stats.sample_count;
  Gmm out = generic;
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double nk = stats.counts[col];
    const double alpha = nk / (nk + rho);
    out.weights[col] = alpha * nk / n + (1.0 - alpha) * generic.weights[col];
    out.means[j] = alpha * stats.means[j] + (1.0 - alpha) * generic.means[j];

    Eigen::MatrixXd cov;
    if (fast_covariance) {
      cov = mstep_covariance_fast(stats.second_moments[j], out.means[j], generic.means[j],
                                  generic.covariances[j], alpha, sigma_tilde_sq);
    } else if (nk > 0.0) {
      cov = mstep_covariance_direct(*patches, gamma->col(col), nk, out.means[j],
                                    generic.means[j], generic.covariances[j], alpha,
                                    sigma_tilde_sq);
    } else {
      cov = generic.covariances[j] + outer(generic.means[j] - out.means[j]);
    }
    out.covariances[j] = condition_psd(cov, psd_floor);
  }
  out.weights /= out.weights.sum();
  return out;
}

AdaptationResult adapt(const Gmm& generic, const PatchSet& patches,
                       const AdaptationConfig& config) {
  if (patches.dim() != generic.dim()) {
    throw DimensionMismatch("adapt: patch dimension " + std::to_string(patches.dim()) +
                            " != model dimension " + std::to_string(generic.dim()));
  }
  if (patches.count() == 0) throw InsufficientData("adapt: no patches");
  if (config.iterations == 0) throw InvalidArgument("adapt: iterations must be >= 1");
  if (!(config.sigma_tilde_sq >= 0.0)) throw InvalidArgument("adapt: sigma_tilde_sq must be >= 0");

  const HyperParams prior = derive_hyperparams(generic, config.rho);
  AdaptationResult result{generic, {}};
  Responsibilities resp = responsibilities(generic, patches, config.sigma_tilde_sq);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const SufficientStats stats = sufficient_stats(patches, resp.gamma);
    const auto start = std::chrono::steady_clock::now();
    result.model = adapt_mstep(generic, stats, config.rho, config.sigma_tilde_sq,
                               config.psd_floor, config.fast_covariance, &patches, &resp.gamma);
    result.report.mstep_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report.counts = stats.counts;
    result.report.alpha = (stats.counts.array() / (stats.counts.array() + config.rho)).matrix();

    // The E-step of the next iteration also yields this iterate's likelihood.
    resp = responsibilities(result.model, patches, config.sigma_tilde_sq);
    result.report.objective.push_back(resp.total_log_likelihood() +
                                      log_hyperprior(result.model, prior));
  }
  return result;
}

HyperParams posterior_hyperparams(const HyperParams& hyper, const SufficientStats& stats) {
  if (hyper.num_components() != stats.num_components()) {
    throw DimensionMismatch("hyper-parameters vs statistics component count");
  }
  HyperParams out = hyper;
  for (std::size_t j = 0; j < hyper.num_components(); ++j) {
    const auto& h = hyper.components[j];
    auto& o = out.components[j];
    const double nk = stats.counts[static_cast<Eigen::Index>(j)];
    o.pseudo_count = h.pseudo_count + nk;
    o.dof = h.dof + nk;
    o.mean_strength = h.mean_strength + nk;
    o.prior_mean = (h.mean_strength * h.prior_mean + nk * stats.means[j]) / (h.mean_strength + nk);
    o.scale = h.scale + stats.scatters[j] +
              (h.mean_strength * nk) / (h.mean_strength + nk) * outer(h.prior_mean - stats.means[j]);
  }
  return out;
}

Gmm mstep_general(const HyperParams& hyper, const SufficientStats& stats) {
  const std::size_t k = hyper.num_components();
  if (k != stats.num_components()) {
    throw DimensionMismatch("hyper-parameters vs statistics component count");
  }
  const double n = stats.sample_count;
  double pseudo_total = 0.0;  // sum_k v_k - K
  for (const auto& h : hyper.components) pseudo_total += h.pseudo_count - 1.0;

  Gmm out;
  out.weights.resize(static_cast<Eigen::Index>(k));
  out.means.resize(k);
  out.covariances.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& h = hyper.components[j];
    const auto col = static_cast<Eigen::Index>(j);
    const double nk = stats.counts[col];
    const double d = static_cast<double>(h.prior_mean.size());
    out.weights[col] = (nk + h.pseudo_count - 1.0) / (pseudo_total + n);
    out.means[j] = (nk * stats.means[j] + h.mean_strength * h.prior_mean) / (h.mean_strength + nk);
    // sum_i gamma_ki (p_i - mu')(p_i - mu')^T = S_k + n_k (mu_bar - mu')(mu_bar - mu')^T
    const Eigen::MatrixXd data_scatter = stats.scatters[j] + nk * outer(stats.means[j] - out.means[j]);
    out.covariances[j] = (data_scatter + h.scale + h.mean_strength * outer(h.prior_mean - out.means[j])) /
                         (h.dof + d + 2.0 + nk);
  }
  return out;
}

}  // namespace patchprior
