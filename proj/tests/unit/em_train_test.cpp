#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "patchprior/em_train.hpp"
#include "patchprior/errors.hpp"
#include "patchprior/synthetic.hpp"
#include "test_support.hpp"

namespace pp = patchprior;

namespace {

pp::Gmm two_clusters() {
  pp::Gmm g;
  g.weights = Eigen::Vector2d(0.5, 0.5);
  g.means = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(10.0, 10.0)};
  g.covariances = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
  return g;
}

Eigen::MatrixXd fixed_count_clusters(std::uint64_t seed) {
  // 200 points per cluster exactly.
  const pp::Gmm g = two_clusters();
  pp::Gmm one = g;
  one.weights = Eigen::VectorXd::Ones(1);
  one.means = {g.means[0]};
  one.covariances = {g.covariances[0]};
  Eigen::MatrixXd a = pp::sample_mixture(one, 200, seed).points;
  one.means = {g.means[1]};
  Eigen::MatrixXd b = pp::sample_mixture(one, 200, seed + 1000).points;
  Eigen::MatrixXd all(2, 400);
  all << a, b;
  return all;
}

}  // namespace

TEST(EmFit, SingleComponentClosedForm) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd data = pp::testing::random_matrix(3, 150, rng, 5.0);
  pp::EmConfig config;
  config.components = 1;
  config.max_iters = 1;
  const auto fit = pp::em_fit(pp::PatchSet(data), config);
  const Eigen::VectorXd mean = data.rowwise().mean();
  const Eigen::MatrixXd centered = data.colwise() - mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / 150.0;
  EXPECT_DOUBLE_EQ(fit.model.weights[0], 1.0);
  EXPECT_LE((fit.model.means[0] - mean).norm(), 1e-12 * mean.norm() + 1e-12);
  EXPECT_LE(pp::testing::relative_frobenius(fit.model.covariances[0], pp::condition_psd(cov)), 1e-12);
}

TEST(EmFit, RecoversWellSeparatedClusters) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    pp::EmConfig config;
    config.components = 2;
    config.seed = seed;
    const auto fit = pp::em_fit(pp::PatchSet(fixed_count_clusters(seed * 17 + 3)), config);
    const bool ok = pp::matched_mean_error(fit.model, two_clusters()) < 2 * 0.5 &&
                    std::abs(fit.model.weights[0] - 0.5) < 0.1 &&
                    std::abs(fit.model.weights[1] - 0.5) < 0.1;
    const auto& m = fit.model.means;
    const bool each = std::min((m[0] - two_clusters().means[0]).norm(),
                               (m[1] - two_clusters().means[0]).norm()) < 0.5 &&
                      std::min((m[0] - two_clusters().means[1]).norm(),
                               (m[1] - two_clusters().means[1]).norm()) < 0.5;
    good += ok && each;
  }
  EXPECT_GE(good, 9);
}

TEST(EmFit, LogLikelihoodNonDecreasing) {
  std::mt19937_64 rng(3);
  const pp::Gmm truth = pp::testing::random_gmm(4, 3, rng, 4.0);
  const auto sample = pp::sample_mixture(truth, 600, 5);
  for (auto init : {pp::EmInit::kmeans_plus_plus, pp::EmInit::random_responsibility}) {
    pp::EmConfig config;
    config.components = 4;
    config.max_iters = 60;
    config.tol = 1e-12;
    config.init = init;
    const auto fit = pp::em_fit(pp::PatchSet(sample.points), config);
    ASSERT_GE(fit.log_likelihood_trace.size(), 2u);
    for (std::size_t t = 1; t < fit.log_likelihood_trace.size(); ++t) {
      EXPECT_GE(fit.log_likelihood_trace[t], fit.log_likelihood_trace[t - 1] - 1e-8);
    }
  }
}

TEST(EmFit, DeterministicPerSeed) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd data = pp::testing::random_matrix(4, 300, rng, 3.0);
  pp::EmConfig config;
  config.components = 3;
  config.seed = 99;
  const auto a = pp::em_fit(pp::PatchSet(data), config);
  const auto b = pp::em_fit(pp::PatchSet(data), config);
  EXPECT_EQ(a.model.weights, b.model.weights);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.model.means[k], b.model.means[k]);
    EXPECT_EQ(a.model.covariances[k], b.model.covariances[k]);
  }
  EXPECT_EQ(a.log_likelihood_trace, b.log_likelihood_trace);
}

TEST(EmFit, PermutingSamplesGivesSameModelUpToRelabeling) {
  const Eigen::MatrixXd data = fixed_count_clusters(77);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(data.cols()));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd shuffled(data.rows(), data.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled.col(static_cast<Eigen::Index>(i)) = data.col(perm[i]);

  pp::EmConfig config;
  config.components = 2;
  config.tol = 1e-12;
  config.max_iters = 300;
  const auto a = pp::em_fit(pp::PatchSet(data), config).model;
  const auto b = pp::em_fit(pp::PatchSet(shuffled), config).model;
  EXPECT_LT(pp::matched_mean_error(a, b), 1e-6);
}

TEST(EmFit, FewerSamplesThanComponentsThrows) {
  std::mt19937_64 rng(6);
  pp::EmConfig config;
  config.components = 5;
  EXPECT_THROW(pp::em_fit(pp::PatchSet(pp::testing::random_matrix(2, 4, rng)), config),
               pp::InsufficientData);
}

TEST(EmFit, EmptyComponentIsReseededAndLogged) {
  const Eigen::MatrixXd data = Eigen::MatrixXd::Constant(2, 10, 3.0);
  pp::EmConfig config;
  config.components = 2;
  config.max_iters = 3;
  const auto fit = pp::em_fit(pp::PatchSet(data), config);
  EXPECT_FALSE(fit.events.empty());
  EXPECT_EQ(fit.model.num_components(), 2u);
  EXPECT_NO_THROW(pp::validate(fit.model));
}

TEST(EmFitWithInflation, ZeroNoiseMatchesPlainEm) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd data = pp::testing::random_matrix(3, 200, rng, 3.0);
  pp::EmConfig config;
  config.components = 3;
  config.seed = 12;
  const auto a = pp::em_fit(pp::PatchSet(data), config);
  const auto b = pp::em_fit_with_inflation(pp::PatchSet(data), config, 0.0);
  EXPECT_EQ(a.model.weights, b.model.weights);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.model.means[k], b.model.means[k]);
    EXPECT_EQ(a.model.covariances[k], b.model.covariances[k]);
  }
}

TEST(EmFitWithInflation, RemovesKnownNoiseVariance) {
  pp::Gmm truth;
  truth.weights = Eigen::VectorXd::Ones(1);
  truth.means = {Eigen::VectorXd::Constant(1, 10.0)};
  truth.covariances = {Eigen::MatrixXd::Constant(1, 1, 4.0 + 1.0)};  // clean 4 plus noise 1
  const auto sample = pp::sample_mixture(truth, 10000, 8);
  pp::EmConfig config;
  config.components = 1;
  const auto compensated = pp::em_fit_with_inflation(pp::PatchSet(sample.points), config, 1.0);
  const auto plain = pp::em_fit(pp::PatchSet(sample.points), config);
  EXPECT_NEAR(compensated.model.covariances[0](0, 0), 4.0, 0.3);
  EXPECT_NEAR(plain.model.covariances[0](0, 0), 5.0, 0.3);
}

TEST(EmFitWithInflation, ExcessNoiseClampsToFloor) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd data = pp::testing::random_matrix(2, 100, rng, 1.0);
  pp::EmConfig config;
  config.components = 2;
  const auto fit = pp::em_fit_with_inflation(pp::PatchSet(data), config, 100.0);
  for (const auto& c : fit.model.covariances) {
    EXPECT_LE((c - pp::kDefaultPsdFloor * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}
