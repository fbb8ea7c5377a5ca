#include "patchprior/gmm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "patchprior/errors.hpp"
#include "patchprior/parallel.hpp"

namespace patchprior {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(got) +
                            " != " + std::to_string(want));
  }
}

}  // namespace

namespace {

// Tolerance for eigenvalues recomputed from a stored matrix.
double floor_slack(const Eigen::VectorXd& eigenvalues, double floor) {
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  return 1e-9 * floor + 16.0 * static_cast<double>(eigenvalues.size()) *
                            std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

void validate(const Gmm& gmm, double psd_floor) {
  const std::size_t k = gmm.num_components();
  if (k == 0) throw InvalidArgument("mixture has no components");
  if (static_cast<std::size_t>(gmm.weights.size()) != k || gmm.covariances.size() != k) {
    throw DimensionMismatch("mixture weights/means/covariances disagree on K");
  }
  const auto d = static_cast<Eigen::Index>(gmm.dim());
  if (d == 0) throw InvalidArgument("mixture dimension is zero");
  if ((gmm.weights.array() < 0.0).any() || std::abs(gmm.weights.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("mixture weights are not on the probability simplex");
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto& c = gmm.covariances[j];
    if (gmm.means[j].size() != d || c.rows() != d || c.cols() != d) {
      throw DimensionMismatch("component " + std::to_string(j) + " has inconsistent dimension");
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidArgument("covariance " + std::to_string(j) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < psd_floor - floor_slack(eig.eigenvalues(), psd_floor)) {
      throw InvalidArgument("covariance " + std::to_string(j) + " is below the PSD floor");
    }
  }
}

Eigen::MatrixXd condition_psd(const Eigen::MatrixXd& sigma, double floor) {
  if (sigma.rows() != sigma.cols()) throw DimensionMismatch("condition_psd: matrix not square");
  if (!(floor > 0.0)) throw InvalidArgument("condition_psd: floor must be positive");
  Eigen::MatrixXd sym = symmetrized(sigma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalFailure("condition_psd: eigendecomposition failed");
  }
  if (eig.eigenvalues().minCoeff() >= floor * (1.0 - 1e-9)) return sym;
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd out = symmetrized(eig.eigenvectors() * clamped.asDiagonal() *
                                    eig.eigenvectors().transpose());
  // Reconstruction roundoff scales with the largest eigenvalue; shift it away.
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(out, Eigen::EigenvaluesOnly);
    const double low = check.eigenvalues().minCoeff();
    if (low >= floor) break;
    out.diagonal().array() += (floor - low) * (1.0 + 1e-6);
  }
  return out;
}

GaussianDensity::GaussianDensity(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                                 double inflation, std::size_t component)
    : mean_(mean) {
  const auto d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d) {
    throw DimensionMismatch("covariance shape does not match mean of dimension " +
                            std::to_string(d));
  }
  if (!(inflation >= 0.0)) throw InvalidArgument("density inflation must be >= 0");
  Eigen::MatrixXd a = symmetrized(covariance);
  a.diagonal().array() += inflation;
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    throw IllConditionedCovariance(component, "Cholesky factorization failed");
  }
  const auto diag = llt_.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw IllConditionedCovariance(component, "non-positive pivot");
  }
  log_det_ = 2.0 * diag.array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(d) * kLog2Pi + log_det_);
}

double GaussianDensity::log_density(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  require_dim(static_cast<std::size_t>(p.size()), dim(), "log_density");
  const Eigen::VectorXd z = llt_.matrixL().solve(p - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

Eigen::VectorXd GaussianDensity::log_density_columns(const Eigen::MatrixXd& samples) const {
  require_dim(static_cast<std::size_t>(samples.rows()), dim(), "log_density");
  Eigen::MatrixXd z = samples.colwise() - mean_;
  llt_.matrixL().solveInPlace(z);
  return (log_norm_ - 0.5 * z.colwise().squaredNorm().array()).matrix().transpose();
}

double log_gaussian(const Eigen::VectorXd& p, const Eigen::VectorXd& mu,
                    const Eigen::MatrixXd& sigma, double inflation) {
  require_dim(static_cast<std::size_t>(p.size()), static_cast<std::size_t>(mu.size()),
              "log_gaussian");
  return GaussianDensity(mu, sigma, inflation).log_density(p);
}

Eigen::MatrixXd weighted_log_densities(const Gmm& gmm, const PatchSet& patches,
                                       double inflation) {
  require_dim(patches.dim(), gmm.dim(), "patches vs mixture");
  const std::size_t k = gmm.num_components();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(patches.count()), static_cast<Eigen::Index>(k));
  parallel_for(k, [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double log_w = std::log(gmm.weights[col]);
    GaussianDensity density(gmm.means[j], gmm.covariances[j], inflation, j);
    out.col(col) = density.log_density_columns(patches.data()).array() + log_w;
  });
  return out;
}

Responsibilities responsibilities(const Gmm& gmm, const PatchSet& patches, double inflation) {
  Responsibilities r;
  r.gamma = weighted_log_densities(gmm, patches, inflation);
  const Eigen::Index n = r.gamma.rows();
  r.log_likelihood.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = r.gamma.row(i);
    const double peak = row.maxCoeff();
    if (!std::isfinite(peak)) throw DegeneratePatch(static_cast<std::size_t>(i));
    row = (row.array() - peak).exp();
    const double total = row.sum();
    row /= total;
    r.log_likelihood[i] = peak + std::log(total);
  }
  r.counts = r.gamma.colwise().sum().transpose();
  return r;
}

SufficientStats sufficient_stats(const PatchSet& patches, const Eigen::MatrixXd& gamma) {
  if (static_cast<std::size_t>(gamma.rows()) != patches.count()) {
    throw DimensionMismatch("responsibility rows do not match patch count");
  }
  const auto d = static_cast<Eigen::Index>(patches.dim());
  const std::size_t k = static_cast<std::size_t>(gamma.cols());
  SufficientStats s;
  s.sample_count = static_cast<double>(patches.count());
  s.counts = gamma.colwise().sum().transpose();
  s.means.assign(k, Eigen::VectorXd::Zero(d));
  s.scatters.assign(k, Eigen::MatrixXd::Zero(d, d));
  s.second_moments.assign(k, Eigen::MatrixXd::Zero(d, d));

  const Eigen::MatrixXd& data = patches.data();
  parallel_for(k, [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double nk = s.counts[col];
    if (!(nk > 0.0)) return;
    const auto w = gamma.col(col);
    Eigen::VectorXd mean = data * w / nk;
    Eigen::MatrixXd b = data.colwise() - mean;
    b.array().rowwise() *= w.transpose().array().sqrt();
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(b);
    scatter.triangularView<Eigen::StrictlyUpper>() = scatter.transpose();
    s.second_moments[j] = scatter / nk + mean * mean.transpose();
    s.scatters[j] = std::move(scatter);
    s.means[j] = std::move(mean);
  });
  return s;
}

HyperParams derive_hyperparams(const Gmm& generic, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("relevance factor rho must be > 0");
  const std::size_t k = generic.num_components();
  const double d = static_cast<double>(generic.dim());
  HyperParams h;
  h.components.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& c = h.components[j];
    c.pseudo_count = 1.0 + rho * static_cast<double>(k) * generic.weights[static_cast<Eigen::Index>(j)];
    c.prior_mean = generic.means[j];
    c.mean_strength = rho;
    c.dof = rho - d - 2.0;
    c.scale = rho * generic.covariances[j];
  }
  return h;
}

HyperParams derive_hyperparams(const Gmm& generic, double rho, const Eigen::VectorXd& counts) {
  HyperParams h = derive_hyperparams(generic, rho);
  const std::size_t k = generic.num_components();
  if (static_cast<std::size_t>(counts.size()) != k) {
    throw DimensionMismatch("counts vector does not match component count");
  }
  const double n = counts.sum();
  const Eigen::ArrayXd alpha = counts.array() / (counts.array() + rho);
  const Eigen::ArrayXd target =
      alpha * counts.array() / n + (1.0 - alpha) * generic.weights.array();
  const double total_pseudo = rho * static_cast<double>(k);  // sum_k (v_k - 1)
  for (std::size_t j = 0; j < k; ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    h.components[j].pseudo_count =
        1.0 + target[i] / target.sum() * (total_pseudo + n) - counts[i];
  }
  return h;
}

double log_hyperprior(const Gmm& model, const HyperParams& hyper) {
  const std::size_t k = model.num_components();
  if (hyper.num_components() != k) throw DimensionMismatch("hyper-prior vs model component count");
  const double d = static_cast<double>(model.dim());
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& h = hyper.components[j];
    require_dim(static_cast<std::size_t>(h.prior_mean.size()), model.dim(), "hyper-prior mean");
    const double w = model.weights[static_cast<Eigen::Index>(j)];
    if (h.pseudo_count != 1.0) total += (h.pseudo_count - 1.0) * std::log(w);

    Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(model.covariances[j]));
    if (llt.info() != Eigen::Success) throw IllConditionedCovariance(j, "hyper-prior evaluation");
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const Eigen::VectorXd diff = model.means[j] - h.prior_mean;
    const double quad = diff.dot(llt.solve(diff));
    const double trace = llt.solve(h.scale).trace();
    total += -0.5 * (h.dof + d + 2.0) * log_det - 0.5 * h.mean_strength * quad - 0.5 * trace;
  }
  return total;
}

double log_likelihood(const Gmm& model, const PatchSet& patches, double inflation) {
  const Eigen::MatrixXd logp = weighted_log_densities(model, patches, inflation);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logp.rows(); ++i) {
    const double peak = logp.row(i).maxCoeff();
    if (!std::isfinite(peak)) throw DegeneratePatch(static_cast<std::size_t>(i));
    total += peak + std::log((logp.row(i).array() - peak).exp().sum());
  }
  return total;
}

double log_posterior_objective(const Gmm& model, const PatchSet& patches,
                               const HyperParams& hyper, double inflation, PriorTerm prior) {
  if (hyper.num_components() != model.num_components()) {
    throw DimensionMismatch("hyper-prior vs model component count");
  }
  const double data_term = log_likelihood(model, patches, inflation);
  if (prior == PriorTerm::flat) return data_term;
  return data_term + log_hyperprior(model, hyper);
}

}  // namespace patchprior
