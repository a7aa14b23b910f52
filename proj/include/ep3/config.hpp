#pragma once

// Flat key = value run configuration and the run manifest.
//
// Keys ending in _mhz hold linear frequencies in MHz; the typed accessor
// frequency() multiplies them by 2 pi and returns rad/us. Times are in us.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ep3 {

enum class KeyType { real, integer, text, seed };

struct KeySpec {
  std::string name;
  KeyType type;
  std::string default_value;  ///< empty: no default
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<KeySpec>& config_keys();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParamConfig {
 public:
  ParamConfig();

  /// Parses key = value lines; `#` starts a comment. Unknown keys, duplicate
  /// keys and malformed values raise ConfigError("<source>:<line>: ...").
  static ParamConfig parse(const std::string& text, const std::string& source = "config");
  static ParamConfig load(const std::filesystem::path& path);

  /// Overrides one key (used for CLI flags); `origin` labels errors.
  void set(const std::string& key, const std::string& value, const std::string& origin = "flag");

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] const std::string& text(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  /// real(key) * 2 pi for *_mhz keys, rad/us.
  [[nodiscard]] double frequency(const std::string& key) const;
  [[nodiscard]] long long integer(const std::string& key) const;
  [[nodiscard]] std::optional<std::uint64_t> seed() const;
  /// "a:b:n" (n points from a to b inclusive) or a comma list.
  [[nodiscard]] std::vector<double> real_list(const std::string& key) const;

  [[nodiscard]] bool shot_noise() const;
  /// Throws ConfigError when shot_noise mode has no seed or values are out
  /// of range.
  void validate() const;

  /// All resolved keys as sorted "key = value" lines; hashed into manifests.
  [[nodiscard]] std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Range syntax shared with the CLI: "a:b:n" or "x1,x2,...".
std::vector<double> parse_real_list(const std::string& s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::optional<std::uint64_t> seed;
  /// (file name, FNV-1a of its bytes)
  std::vector<std::pair<std::string, std::uint64_t>> outputs;
  std::string tool_version;

  [[nodiscard]] std::string str() const;
};

inline constexpr const char* kToolVersion = "ep3 0.1.0";

}  // namespace ep3
