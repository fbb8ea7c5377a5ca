#pragma once

#include <cstdint>
#include <vector>

#include "patchprior/em_adapt.hpp"
#include "patchprior/em_train.hpp"
#include "patchprior/gmm.hpp"
#include "patchprior/image.hpp"

namespace patchprior {

/// n draws from a mixture (columns of the returned d x n matrix) plus the
/// component each draw came from.
struct MixtureSample {
  Eigen::MatrixXd points;
  std::vector<std::size_t> labels;
};

MixtureSample sample_mixture(const Gmm& gmm, std::size_t n, std::uint64_t seed);

/// Sum over components of ||a_k - b_pi(k)|| for the best matching pi of the
/// components of `estimate` to those of `truth` (exhaustive for K <= 8).
double matched_mean_error(const Gmm& estimate, const Gmm& truth);

/// Two related 2-D, 2-component mixtures: the "external" one the generic model
/// is learned from and the "internal" one only a few points are seen from.
Gmm toy_external_mixture();
Gmm toy_internal_mixture();

struct ToyConfig {
  std::uint64_t seed = 0;
  std::size_t external_points = 400;
  std::size_t internal_points = 20;
  double rho = 1.0;
};

struct ToyResult {
  MixtureSample external;    // training data for the generic model
  MixtureSample internal;    // the few points adapted to
  Gmm generic;               // EM on `external`
  Gmm scratch;               // EM from scratch on `internal`
  Gmm adapted;               // `generic` adapted to `internal`
  double scratch_error = 0;  // matched_mean_error against the internal mixture
  double adapted_error = 0;
};

ToyResult run_toy_experiment(const ToyConfig& config);

/// Random axis-aligned rectangles and discs of constant intensity on a flat
/// background.
ImageBuffer piecewise_constant_image(std::size_t width, std::size_t height, std::uint64_t seed,
                                     std::size_t shapes = 24);

/// Mixed-content image: smooth shading, constant shapes, oriented gratings and
/// a light blur. `stripe_angle` (radians) fixes the grating orientation when
/// finite, otherwise it is random.
ImageBuffer textured_image(std::size_t width, std::size_t height, std::uint64_t seed,
                           double stripe_angle);

}  // namespace patchprior
