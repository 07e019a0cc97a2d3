#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sve/mc.hpp"
#include "sve/model.hpp"

namespace sve::cli {

/// Flat `section.key = value` configuration. Lines starting with '#' are
/// comments; keys outside the known set are rejected.
class RunConfig {
 public:
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::optional<double> number(const std::string& key) const;
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

/// Model from the model.* keys (a preset or custom expressions).
DiffusionSpec build_model(const RunConfig& cfg);
MarketSpec build_market(const RunConfig& cfg);
McConfig build_mc(const RunConfig& cfg, const DiffusionSpec& spec);

/// Strict decimal parse; throws a configuration error naming `what`.
double parse_number(std::string_view text, const std::string& what);

}  // namespace sve::cli
