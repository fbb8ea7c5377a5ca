#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace patchprior {

/// Single-channel image, row-major, intensities on the [0, 255] scale.
/// Values may leave that range while an estimate is being refined.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(std::size_t width, std::size_t height, double fill = 0.0);
  ImageBuffer(std::size_t width, std::size_t height, std::vector<double> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  double& operator[](std::size_t i) { return pixels_[i]; }
  double operator[](std::size_t i) const { return pixels_[i]; }

  const std::vector<double>& pixels() const noexcept { return pixels_; }
  std::vector<double>& pixels() noexcept { return pixels_; }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

/// y = x + e with e ~ N(0, sigma^2) i.i.d., drawn from a generator seeded with
/// `seed`. No clipping.
ImageBuffer add_gaussian_noise(const ImageBuffer& img, double sigma, std::uint64_t seed);

/// Mean squared error between two images of equal shape.
double mse(const ImageBuffer& reference, const ImageBuffer& test);

/// Reported in place of +inf when the images are identical.
inline constexpr double kPsnrIdentical = 99.0;

/// 10 log10(255^2 / MSE) in dB.
double psnr(const ImageBuffer& reference, const ImageBuffer& test);

}  // namespace patchprior
