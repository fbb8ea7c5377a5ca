#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace patchprior {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Flat key = value record of one CLI run, written next to its primary output.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void record_timing(const std::string& phase, double seconds);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }
  std::string to_string() const;
  /// Writes "<primary_output>.manifest".
  std::filesystem::path write_next_to(const std::filesystem::path& primary_output) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace patchprior
