#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace dcrm {

/// Ordered `key = value` text file describing how an artifact was produced.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  std::optional<std::string> get(const std::string& key) const;
  /// Throws ConfigError when the key is missing.
  const std::string& require(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  void write(const std::filesystem::path& path) const;
  static Manifest read(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> entries_;
};

/// Library version plus `git describe` output when available at build time.
std::string version_string();

}  // namespace dcrm
