#include "patchprior/synthetic.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "patchprior/errors.hpp"

namespace patchprior {

MixtureSample sample_mixture(const Gmm& gmm, std::size_t n, std::uint64_t seed) {
  const std::size_t k = gmm.num_components();
  const auto d = static_cast<Eigen::Index>(gmm.dim());
  std::vector<Eigen::MatrixXd> factors;
  for (const auto& c : gmm.covariances) {
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) throw IllConditionedCovariance(factors.size(), "sampling");
    factors.push_back(llt.matrixL());
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(gmm.weights.data(), gmm.weights.data() + k);
  std::normal_distribution<double> normal(0.0, 1.0);
  MixtureSample out{Eigen::MatrixXd(d, static_cast<Eigen::Index>(n)), std::vector<std::size_t>(n)};
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = pick(rng);
    for (Eigen::Index r = 0; r < d; ++r) z[r] = normal(rng);
    out.points.col(static_cast<Eigen::Index>(i)) = gmm.means[j] + factors[j] * z;
    out.labels[i] = j;
  }
  return out;
}

double matched_mean_error(const Gmm& estimate, const Gmm& truth) {
  const std::size_t k = truth.num_components();
  if (estimate.num_components() != k) throw DimensionMismatch("matched_mean_error: K differs");
  if (k > 8) throw InvalidArgument("matched_mean_error: K > 8");
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double err = 0.0;
    for (std::size_t j = 0; j < k; ++j) err += (estimate.means[perm[j]] - truth.means[j]).norm();
    best = std::min(best, err);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

Eigen::MatrixXd cov2(double xx, double xy, double yy) {
  Eigen::MatrixXd c(2, 2);
  c << xx, xy, xy, yy;
  return c;
}

Gmm two_component(double w0, Eigen::Vector2d m0, Eigen::MatrixXd c0, Eigen::Vector2d m1,
                  Eigen::MatrixXd c1) {
  Gmm g;
  g.weights = Eigen::Vector2d(w0, 1.0 - w0);
  g.means = {m0, m1};
  g.covariances = {std::move(c0), std::move(c1)};
  return g;
}

}  // namespace

Gmm toy_external_mixture() {
  return two_component(0.5, {-1.5, 0.0}, cov2(1.0, 0.6, 1.0), {1.5, 0.0}, cov2(1.0, -0.6, 1.0));
}

Gmm toy_internal_mixture() {
  return two_component(0.4, {-1.1, 0.6}, cov2(0.9, 0.5, 1.1), {1.9, 0.4}, cov2(1.2, -0.5, 0.9));
}

ToyResult run_toy_experiment(const ToyConfig& config) {
  ToyResult r;
  const Gmm external = toy_external_mixture();
  const Gmm internal = toy_internal_mixture();
  r.external = sample_mixture(external, config.external_points, config.seed * 2 + 1);
  r.internal = sample_mixture(internal, config.internal_points, config.seed * 2 + 2);

  EmConfig em;
  em.components = 2;
  em.max_iters = 500;
  em.tol = 1e-10;
  em.seed = config.seed;
  r.generic = em_fit(PatchSet(r.external.points), em).model;
  r.scratch = em_fit(PatchSet(r.internal.points), em).model;

  AdaptationConfig ac;
  ac.rho = config.rho;
  r.adapted = adapt(r.generic, PatchSet(r.internal.points), ac).model;

  r.scratch_error = matched_mean_error(r.scratch, internal);
  r.adapted_error = matched_mean_error(r.adapted, internal);
  return r;
}

ImageBuffer piecewise_constant_image(std::size_t width, std::size_t height, std::uint64_t seed,
                                     std::size_t shapes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(20.0, 235.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ImageBuffer img(width, height, level(rng));
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  for (std::size_t s = 0; s < shapes; ++s) {
    const double value = level(rng);
    const double cx = unit(rng) * w;
    const double cy = unit(rng) * h;
    const double rx = (0.05 + 0.2 * unit(rng)) * w;
    const double ry = (0.05 + 0.2 * unit(rng)) * h;
    const bool disc = unit(rng) < 0.5;
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
        const double dy = (static_cast<double>(r) + 0.5 - cy) / ry;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) img.at(r, c) = value;
      }
    }
  }
  return img;
}

ImageBuffer textured_image(std::size_t width, std::size_t height, std::uint64_t seed,
                           double stripe_angle) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);

  // Smooth shading.
  const double base = 60.0 + 120.0 * unit(rng);
  const double gx = (unit(rng) - 0.5) * 80.0;
  const double gy = (unit(rng) - 0.5) * 80.0;
  ImageBuffer img(width, height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      img.at(r, c) = base + gx * static_cast<double>(c) / w + gy * static_cast<double>(r) / h;
    }
  }

  // Constant shapes and grating-filled shapes.
  const std::size_t shapes = 10 + static_cast<std::size_t>(unit(rng) * 10.0);
  for (std::size_t s = 0; s < shapes; ++s) {
    const double value = 20.0 + 215.0 * unit(rng);
    const double cx = unit(rng) * w;
    const double cy = unit(rng) * h;
    const double rx = (0.06 + 0.25 * unit(rng)) * w;
    const double ry = (0.06 + 0.25 * unit(rng)) * h;
    const bool disc = unit(rng) < 0.5;
    const bool grating = unit(rng) < 0.35;
    const double angle = std::isfinite(stripe_angle) ? stripe_angle : unit(rng) * std::numbers::pi;
    const double period = 4.0 + 8.0 * unit(rng);
    const double amplitude = 20.0 + 50.0 * unit(rng);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double px = static_cast<double>(c) + 0.5;
        const double py = static_cast<double>(r) + 0.5;
        const double dx = (px - cx) / rx;
        const double dy = (py - cy) / ry;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (!inside) continue;
        double v = value;
        if (grating) {
          v += amplitude * std::sin(2.0 * std::numbers::pi * (ca * px + sa * py) / period);
        }
        img.at(r, c) = v;
      }
    }
  }

  // 3x3 binomial blur softens the edges.
  ImageBuffer out(width, height);
  const double kernel[3] = {0.25, 0.5, 0.25};
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
          const auto rr = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(r) + i, 0, static_cast<long>(height) - 1));
          const auto cc = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(c) + j, 0, static_cast<long>(width) - 1));
          acc += kernel[i + 1] * kernel[j + 1] * img.at(rr, cc);
        }
      }
      out.at(r, c) = std::clamp(acc, 0.0, 255.0);
    }
  }
  return out;
}

}  // namespace patchprior
