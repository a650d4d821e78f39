#include "dcrm/manifest.hpp"

#include <fstream>

#include "dcrm/errors.hpp"

#ifndef DCRM_VERSION
#define DCRM_VERSION "unknown"
#endif

namespace dcrm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::optional<std::string> Manifest::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::string& Manifest::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("manifest has no entry '" + key + "'");
  return it->second;
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot write " + path.string());
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  if (!out) throw FormatError(FormatError::Kind::kIo, "short write to " + path.string());
}

Manifest Manifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, "cannot open " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError(FormatError::Kind::kHeaderMismatch,
                        "malformed manifest line in " + path.string() + ": " + t);
    m.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return m;
}

std::string version_string() { return DCRM_VERSION; }

}  // namespace dcrm
