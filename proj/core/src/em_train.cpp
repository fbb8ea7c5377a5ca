#include "patchprior/em_train.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "patchprior/errors.hpp"

namespace patchprior {

namespace {

constexpr double kEmptyComponent = 1e-8;

// k-means++ seeding followed by hard assignment to the nearest seed.
Eigen::MatrixXd kmeans_plus_plus_assignment(const Eigen::MatrixXd& data, std::size_t k,
                                            std::mt19937_64& rng) {
  const Eigen::Index n = data.cols();
  std::vector<Eigen::Index> seeds;
  seeds.push_back(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  Eigen::VectorXd nearest = (data.colwise() - data.col(seeds[0])).colwise().squaredNorm().transpose();
  while (seeds.size() < k) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= nearest[pick];
        if (target < 0.0) break;
      }
    } else {
      pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    }
    seeds.push_back(pick);
    nearest = nearest.cwiseMin(
        (data.colwise() - data.col(pick)).colwise().squaredNorm().transpose());
  }

  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double dist = (data.col(i) - data.col(seeds[j])).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<Eigen::Index>(j);
      }
    }
    gamma(i, best) = 1.0;
  }
  return gamma;
}

Eigen::MatrixXd random_responsibilities(Eigen::Index n, std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd gamma(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < gamma.cols(); ++j) gamma(i, j) = -std::log(1.0 - uni(rng));
    gamma.row(i) /= gamma.row(i).sum();
  }
  return gamma;
}

// Gives every component with (near) zero mass a random sample as its mean.
void reseed_empty(Gmm& model, const SufficientStats& stats, const PatchSet& patches,
                  double psd_floor, std::mt19937_64& rng, std::vector<std::string>& events,
                  std::size_t iteration) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  const double floor_weight = 1.0 / stats.sample_count;
  bool changed = false;
  for (std::size_t j = 0; j < model.num_components(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (stats.counts[col] >= kEmptyComponent) continue;
    const auto pick = std::uniform_int_distribution<std::size_t>(0, patches.count() - 1)(rng);
    model.means[j] = patches.patch(pick);
    model.covariances[j] = psd_floor * Eigen::MatrixXd::Identity(d, d);
    model.weights[col] = floor_weight;
    events.push_back("iteration " + std::to_string(iteration) + ": component " +
                     std::to_string(j) + " reseeded at sample " + std::to_string(pick));
    changed = true;
  }
  if (changed) model.weights /= model.weights.sum();
}

EmResult run_em(const PatchSet& patches, const EmConfig& config, double sigma_tilde_sq) {
  const std::size_t k = config.components;
  if (k == 0) throw InvalidArgument("EM needs at least one component");
  if (config.max_iters == 0) throw InvalidArgument("EM needs max_iters >= 1");
  if (!(config.tol > 0.0)) throw InvalidArgument("EM tolerance must be > 0");
  if (!(sigma_tilde_sq >= 0.0)) throw InvalidArgument("sigma_tilde_sq must be >= 0");
  if (patches.count() < k) {
    throw InsufficientData("EM needs at least K = " + std::to_string(k) + " samples, got " +
                           std::to_string(patches.count()));
  }

  std::mt19937_64 rng(config.seed);
  const Eigen::MatrixXd init_gamma =
      config.init == EmInit::kmeans_plus_plus
          ? kmeans_plus_plus_assignment(patches.data(), k, rng)
          : random_responsibilities(static_cast<Eigen::Index>(patches.count()), k, rng);

  EmResult result;
  const auto d = static_cast<Eigen::Index>(patches.dim());
  Gmm fallback;
  fallback.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
  fallback.means.assign(k, Eigen::VectorXd::Zero(d));
  fallback.covariances.assign(k, config.psd_floor * Eigen::MatrixXd::Identity(d, d));

  SufficientStats stats = sufficient_stats(patches, init_gamma);
  result.model = ml_mstep(stats, fallback, config.psd_floor, sigma_tilde_sq);
  reseed_empty(result.model, stats, patches, config.psd_floor, rng, result.events, 0);

  const double n = static_cast<double>(patches.count());
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    const Responsibilities resp = responsibilities(result.model, patches, sigma_tilde_sq);
    const double mean_ll = resp.total_log_likelihood() / n;
    result.log_likelihood_trace.push_back(resp.total_log_likelihood());
    result.iterations = it;
    if (result.log_likelihood_trace.size() >= 2) {
      const double prev = result.log_likelihood_trace[result.log_likelihood_trace.size() - 2] / n;
      if (std::abs(mean_ll - prev) <= config.tol * std::abs(prev)) {
        result.converged = true;
        break;
      }
    }
    stats = sufficient_stats(patches, resp.gamma);
    Gmm next = ml_mstep(stats, result.model, config.psd_floor, sigma_tilde_sq);
    reseed_empty(next, stats, patches, config.psd_floor, rng, result.events, it);
    result.model = std::move(next);
  }
  return result;
}

}  // namespace

Gmm ml_mstep(const SufficientStats& stats, const Gmm& fallback, double psd_floor,
             double sigma_tilde_sq) {
  const std::size_t k = stats.num_components();
  if (fallback.num_components() != k) throw DimensionMismatch("fallback model vs stats");
  Gmm out = fallback;
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double nk = stats.counts[col];
    out.weights[col] = nk / stats.sample_count;
    if (!(nk > 0.0)) continue;
    out.means[j] = stats.means[j];
    Eigen::MatrixXd cov = stats.scatters[j] / nk;
    cov.diagonal().array() -= sigma_tilde_sq;
    out.covariances[j] = condition_psd(cov, psd_floor);
  }
  out.weights /= out.weights.sum();
  return out;
}

EmResult em_fit(const PatchSet& patches, const EmConfig& config) {
  return run_em(patches, config, 0.0);
}

EmResult em_fit_with_inflation(const PatchSet& patches, const EmConfig& config,
                               double sigma_tilde_sq) {
  return run_em(patches, config, sigma_tilde_sq);
}

}  // namespace patchprior
