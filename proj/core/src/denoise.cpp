#include "patchprior/denoise.hpp"

#include <cmath>
#include <string>

#include "patchprior/errors.hpp"
#include "patchprior/parallel.hpp"

namespace patchprior {

HqsSchedule schedule_from_multipliers(double sigma, const std::vector<double>& multipliers) {
  if (!(sigma > 0.0)) throw InvalidArgument("noise sigma must be > 0");
  HqsSchedule s;
  for (double m : multipliers) {
    if (!(m > 0.0)) throw InvalidArgument("beta multipliers must be > 0");
    const double beta = m / (sigma * sigma);
    s.betas.push_back(beta);
    s.mode_inflations.push_back(1.0 / beta);
  }
  return s;
}

HqsSchedule default_schedule(double sigma) {
  return schedule_from_multipliers(sigma, {1.0, 4.0, 8.0, 16.0, 32.0});
}

std::vector<std::size_t> select_modes(const Gmm& prior, const PatchSet& patches,
                                      double inflation) {
  const Eigen::MatrixXd scores = weighted_log_densities(prior, patches, inflation);
  std::vector<std::size_t> modes(patches.count());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    scores.row(i).maxCoeff(&best);
    modes[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
  }
  return modes;
}

namespace {

// v = (beta Sigma + I)^{-1} (mu + beta Sigma p) for every patch assigned to one
// component, with a single factorization.
void update_patches(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, double beta,
                    const std::vector<Eigen::Index>& members, Eigen::MatrixXd& patches) {
  if (members.empty()) return;
  const auto d = mean.size();
  const Eigen::MatrixXd beta_cov = beta * cov;
  Eigen::MatrixXd system = beta_cov;
  system.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (system + system.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("v-update system is not positive definite");
  }
  Eigen::MatrixXd block(d, static_cast<Eigen::Index>(members.size()));
  for (std::size_t m = 0; m < members.size(); ++m) {
    block.col(static_cast<Eigen::Index>(m)) = patches.col(members[m]);
  }
  Eigen::MatrixXd rhs = beta_cov * block;
  rhs.colwise() += mean;
  llt.solveInPlace(rhs);
  for (std::size_t m = 0; m < members.size(); ++m) {
    patches.col(members[m]) = rhs.col(static_cast<Eigen::Index>(m));
  }
}

}  // namespace

DenoiseResult denoise(const ImageBuffer& noisy, double sigma, const Gmm& prior,
                      const HqsSchedule& schedule, const std::optional<ImageBuffer>& reference) {
  if (!(sigma > 0.0)) throw InvalidArgument("noise sigma must be > 0");
  if (schedule.betas.size() != schedule.mode_inflations.size()) {
    throw InvalidArgument("schedule betas and mode inflations differ in length");
  }
  for (double b : schedule.betas) {
    if (!(b > 0.0)) throw InvalidArgument("schedule betas must be > 0");
  }
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(prior.dim()))));
  if (side * side != prior.dim() || side == 0) {
    throw DimensionMismatch("prior dimension " + std::to_string(prior.dim()) +
                            " is not a square patch");
  }
  if (reference && !reference->same_shape(noisy)) {
    throw DimensionMismatch("reference image shape differs from the noisy image");
  }

  const double data_weight =
      (schedule.data_weight > 0.0 ? schedule.data_weight : static_cast<double>(prior.dim())) /
      (sigma * sigma);
  const std::size_t k = prior.num_components();

  DenoiseResult result;
  result.image = noisy;
  for (std::size_t stage = 0; stage < schedule.betas.size(); ++stage) {
    const double beta = schedule.betas[stage];
    PatchSet patches = extract_patches(result.image, side, 1);
    const auto modes = select_modes(prior, patches, schedule.mode_inflations[stage]);

    std::vector<std::vector<Eigen::Index>> members(k);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      members[modes[i]].push_back(static_cast<Eigen::Index>(i));
    }
    parallel_for(k, [&](std::size_t j) {
      update_patches(prior.means[j], prior.covariances[j], beta, members[j], patches.data());
    });

    const auto acc = accumulate_patches(patches, noisy.width(), noisy.height());
    for (std::size_t p = 0; p < noisy.size(); ++p) {
      result.image[p] = (data_weight * noisy[p] + beta * acc.sum[p]) /
                        (data_weight + beta * acc.count[p]);
    }
    if (!result.image.all_finite()) {
      throw NumericalFailure("non-finite pixel values at denoising stage " + std::to_string(stage));
    }

    std::vector<std::size_t> histogram(k, 0);
    for (auto m : modes) ++histogram[m];
    result.mode_histograms.push_back(std::move(histogram));
    if (reference) result.psnr_trace.push_back(psnr(*reference, result.image));
  }
  return result;
}

}  // namespace patchprior
