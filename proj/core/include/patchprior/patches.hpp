#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <vector>

#include "patchprior/image.hpp"

namespace patchprior {

struct PatchOrigin {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

/// Where the patches of a PatchSet came from, needed to put them back.
struct PatchGrid {
  std::size_t patch_size = 0;  // side length s, d = s * s
  std::size_t stride = 1;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<PatchOrigin> origins;
};

/// n samples of dimension d. Column i of data() is sample i; for image patches
/// the column holds the patch pixels in row-major order (the memory layout is
/// that of an n x d row-major matrix).
class PatchSet {
 public:
  PatchSet() = default;
  explicit PatchSet(Eigen::MatrixXd data);
  PatchSet(Eigen::MatrixXd data, PatchGrid grid);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t count() const noexcept { return static_cast<std::size_t>(data_.cols()); }

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Eigen::MatrixXd& data() noexcept { return data_; }
  auto patch(std::size_t i) const { return data_.col(static_cast<Eigen::Index>(i)); }

  bool has_grid() const noexcept { return grid_.has_value(); }
  const PatchGrid& grid() const;

 private:
  Eigen::MatrixXd data_;
  std::optional<PatchGrid> grid_;
};

/// Origins (r * stride, c * stride) plus a trailing row/column of origins so
/// that every pixel is covered. Requires stride <= patch_size <= min(width,
/// height). Raw intensities, no mean removal.
std::vector<PatchOrigin> patch_origins(std::size_t width, std::size_t height,
                                       std::size_t patch_size, std::size_t stride);

PatchSet extract_patches(const ImageBuffer& img, std::size_t patch_size, std::size_t stride);

struct AccumulatedImage {
  ImageBuffer sum;    // sum over covering patches of the patch value
  ImageBuffer count;  // number of covering patches, diagonal of sum P_i^T P_i
};

AccumulatedImage accumulate_patches(const PatchSet& patches, std::size_t width,
                                    std::size_t height);

/// sum / count, pixel-wise.
ImageBuffer average_patches(const PatchSet& patches, std::size_t width, std::size_t height);

}  // namespace patchprior
