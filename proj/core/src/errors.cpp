#include "patchprior/errors.hpp"

namespace patchprior {

IllConditionedCovariance::IllConditionedCovariance(std::size_t component,
                                                   const std::string& detail)
    : Error("ill-conditioned covariance in component " +
            std::to_string(component) + ": " + detail),
      component_(component) {}

DegeneratePatch::DegeneratePatch(std::size_t patch_index)
    : Error("patch " + std::to_string(patch_index) +
            " has zero likelihood under every component"),
      patch_index_(patch_index) {}

}  // namespace patchprior
