#pragma once

#include <filesystem>
#include <string_view>

namespace patchprior::detail {

/// Writes to "<path>.tmp" and renames over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view bytes);

}  // namespace patchprior::detail
