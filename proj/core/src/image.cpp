#include "patchprior/image.hpp"

#include <cmath>
#include <random>

#include "patchprior/errors.hpp"

namespace patchprior {

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != width * height) {
    throw DimensionMismatch("pixel count " + std::to_string(pixels_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
}

bool ImageBuffer::all_finite() const noexcept {
  for (double v : pixels_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ImageBuffer add_gaussian_noise(const ImageBuffer& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  ImageBuffer out = img;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& v : out.pixels()) v += normal(rng);
  return out;
}

double mse(const ImageBuffer& reference, const ImageBuffer& test) {
  if (!reference.same_shape(test)) {
    throw DimensionMismatch("mse: image shapes differ");
  }
  if (reference.empty()) throw InvalidArgument("mse: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference[i] - test[i];
    acc += e * e;
  }
  return acc / static_cast<double>(reference.size());
}

double psnr(const ImageBuffer& reference, const ImageBuffer& test) {
  const double err = mse(reference, test);
  if (err == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(255.0 * 255.0 / err);
}

}  // namespace patchprior
