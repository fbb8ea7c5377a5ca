#include "patchprior/patches.hpp"

#include <algorithm>
#include <string>

#include "patchprior/errors.hpp"

namespace patchprior {

PatchSet::PatchSet(Eigen::MatrixXd data) : data_(std::move(data)) {}

PatchSet::PatchSet(Eigen::MatrixXd data, PatchGrid grid)
    : data_(std::move(data)), grid_(std::move(grid)) {
  if (grid_->patch_size * grid_->patch_size != dim() || grid_->origins.size() != count()) {
    throw DimensionMismatch("patch data does not match its grid");
  }
}

const PatchGrid& PatchSet::grid() const {
  if (!grid_) throw InvalidArgument("patch set carries no image geometry");
  return *grid_;
}

namespace {

std::vector<std::size_t> axis_origins(std::size_t extent, std::size_t patch_size,
                                      std::size_t stride) {
  std::vector<std::size_t> out;
  const std::size_t last = extent - patch_size;
  for (std::size_t p = 0; p <= last; p += stride) out.push_back(p);
  if (out.back() != last) out.push_back(last);
  return out;
}

}  // namespace

std::vector<PatchOrigin> patch_origins(std::size_t width, std::size_t height,
                                       std::size_t patch_size, std::size_t stride) {
  if (patch_size == 0) throw InvalidArgument("patch size must be positive");
  if (stride == 0) throw InvalidArgument("stride must be positive");
  if (stride > patch_size) {
    throw InvalidArgument("stride " + std::to_string(stride) + " exceeds patch size " +
                          std::to_string(patch_size) + "; pixels would be left uncovered");
  }
  if (patch_size > std::min(width, height)) {
    throw InvalidArgument("patch size " + std::to_string(patch_size) +
                          " exceeds image dimension " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  const auto rows = axis_origins(height, patch_size, stride);
  const auto cols = axis_origins(width, patch_size, stride);
  std::vector<PatchOrigin> out;
  out.reserve(rows.size() * cols.size());
  for (auto r : rows) {
    for (auto c : cols) out.push_back({r, c});
  }
  return out;
}

PatchSet extract_patches(const ImageBuffer& img, std::size_t patch_size, std::size_t stride) {
  PatchGrid grid{patch_size, stride, img.width(), img.height(),
                 patch_origins(img.width(), img.height(), patch_size, stride)};
  const std::size_t d = patch_size * patch_size;
  Eigen::MatrixXd data(static_cast<Eigen::Index>(d),
                       static_cast<Eigen::Index>(grid.origins.size()));
  for (std::size_t i = 0; i < grid.origins.size(); ++i) {
    const auto [r0, c0] = grid.origins[i];
    double* col = data.col(static_cast<Eigen::Index>(i)).data();
    for (std::size_t dr = 0; dr < patch_size; ++dr) {
      for (std::size_t dc = 0; dc < patch_size; ++dc) {
        *col++ = img.at(r0 + dr, c0 + dc);
      }
    }
  }
  return PatchSet(std::move(data), std::move(grid));
}

AccumulatedImage accumulate_patches(const PatchSet& patches, std::size_t width,
                                    std::size_t height) {
  const PatchGrid& grid = patches.grid();
  if (grid.width != width || grid.height != height) {
    throw DimensionMismatch("patch grid was built for a " + std::to_string(grid.width) + "x" +
                            std::to_string(grid.height) + " image");
  }
  AccumulatedImage acc{ImageBuffer(width, height), ImageBuffer(width, height)};
  const std::size_t s = grid.patch_size;
  for (std::size_t i = 0; i < patches.count(); ++i) {
    const auto [r0, c0] = grid.origins[i];
    const double* col = patches.data().col(static_cast<Eigen::Index>(i)).data();
    for (std::size_t dr = 0; dr < s; ++dr) {
      for (std::size_t dc = 0; dc < s; ++dc) {
        acc.sum.at(r0 + dr, c0 + dc) += *col++;
        acc.count.at(r0 + dr, c0 + dc) += 1.0;
      }
    }
  }
  return acc;
}

ImageBuffer average_patches(const PatchSet& patches, std::size_t width, std::size_t height) {
  auto acc = accumulate_patches(patches, width, height);
  for (std::size_t i = 0; i < acc.sum.size(); ++i) acc.sum[i] /= acc.count[i];
  return acc.sum;
}

}  // namespace patchprior
