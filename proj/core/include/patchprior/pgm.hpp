#pragma once

#include <filesystem>
#include <iosfwd>

#include "patchprior/image.hpp"

namespace patchprior {

/// Reads binary (P5) or ASCII (P2) PGM with maximum gray value 255.
ImageBuffer read_pgm(const std::filesystem::path& path);
ImageBuffer read_pgm(std::istream& in);

/// Writes binary P5; pixels are clamped to [0, 255] and rounded. The file is
/// written to a temporary sibling and renamed into place.
void write_pgm(const ImageBuffer& img, const std::filesystem::path& path);
void write_pgm(const ImageBuffer& img, std::ostream& out);

/// The clamp-and-round applied by write_pgm.
ImageBuffer quantize(const ImageBuffer& img);

}  // namespace patchprior
