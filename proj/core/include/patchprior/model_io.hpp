#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "patchprior/errors.hpp"
#include "patchprior/gmm.hpp"

namespace patchprior {

// GMMP layout, all little-endian:
//   "GMMP" | u16 version = 1 | u32 K | u32 d
//   | K f64 weights | K*d f64 means | K*d*d f64 covariances (row-major)
//   | u32 CRC32 of every preceding byte
inline constexpr std::uint16_t kModelFormatVersion = 1;

class ModelFormatError : public IoError {
 public:
  using IoError::IoError;
};
class BadMagic : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};
class VersionMismatch : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};
class ChecksumMismatch : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};
class TruncatedFile : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

std::string serialize_model(const Gmm& gmm);
/// Parses and validates bytes produced by serialize_model. The loaded model is
/// checked against the mixture invariants with `psd_floor`.
Gmm deserialize_model(const std::string& bytes, double psd_floor = kDefaultPsdFloor);

void save_model(const Gmm& gmm, const std::filesystem::path& path);
Gmm load_model(const std::filesystem::path& path, double psd_floor = kDefaultPsdFloor);

}  // namespace patchprior
