#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace kgres::cli {

/// Invalid or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key" -> value store seeded with every default, so the echoed manifest
/// is complete. Values from a file are applied first, then --override pairs.
class RunConfig {
 public:
  RunConfig();

  /// Reads an INI file ([section] / key = value). Unknown keys are rejected.
  void load_file(const std::string& path);
  void load_string(const std::string& ini_text);
  /// "section.key=value".
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] const std::string& str(const std::string& key) const;
  [[nodiscard]] double num(const std::string& key) const;
  [[nodiscard]] long integer(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;
  /// Comma separated numbers.
  [[nodiscard]] std::vector<double> num_list(const std::string& key) const;

  std::uint64_t seed = 0;
  std::string out_dir = "out";

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  /// Every effective key and value plus seed.
  [[nodiscard]] nlohmann::json manifest() const;
  /// FNV-1a over the canonical "key=value\n" listing and the seed, as 16 hex digits.
  [[nodiscard]] std::string hash() const;

  /// Keys that are defined (used to validate files and overrides).
  static const std::map<std::string, std::string>& defaults();

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest round-trip decimal text of a double ("%.17g" precision when needed).
std::string format_double(double v);

}  // namespace kgres::cli
