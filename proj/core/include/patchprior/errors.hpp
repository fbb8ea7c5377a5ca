#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchprior {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even after PSD conditioning.
class IllConditionedCovariance : public Error {
 public:
  IllConditionedCovariance(std::size_t component, const std::string& detail);
  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

/// Every component assigns log-density -inf (or NaN) to a patch.
class DegeneratePatch : public Error {
 public:
  explicit DegeneratePatch(std::size_t patch_index);
  std::size_t patch_index() const noexcept { return patch_index_; }

 private:
  std::size_t patch_index_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during an iterative computation.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace patchprior
