#include "patchprior/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "atomic_write.hpp"

namespace patchprior {

RunManifest::RunManifest(std::string command) {
  set("command", command);
  set("library_version", kLibraryVersion);
}

void RunManifest::set(const std::string& key, const std::string& value) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == key; });
  if (it != entries_.end()) {
    it->second = value;
  } else {
    entries_.emplace_back(key, value);
  }
}

void RunManifest::set(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  set(key, std::string(buf));
}

void RunManifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

void RunManifest::record_timing(const std::string& phase, double seconds) {
  set("time." + phase + "_seconds", seconds);
}

std::string RunManifest::to_string() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  return out.str();
}

std::filesystem::path RunManifest::write_next_to(const std::filesystem::path& primary_output) const {
  std::filesystem::path path = primary_output;
  path += ".manifest";
  detail::write_file_atomically(path, to_string());
  return path;
}

}  // namespace patchprior
