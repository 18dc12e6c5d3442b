#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brainschema/schema.hpp"

namespace brainschema {

struct BenchPlan;

/// Flat `key = value` settings with '#' comments. Keys mirror the config
/// struct field names; list values are comma-separated.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool empty() const { return values_.empty(); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Strict parsers for config values. Throw ConfigError naming `field`.
count_t parse_count(const std::string& field, const std::string& text);
std::vector<count_t> parse_count_list(const std::string& field, const std::string& text);
std::vector<std::string> parse_name_list(const std::string& field, const std::string& text);

/// "cortex" (default) or "cerebellum", from the `schema` key.
std::string schema_kind(const KeyValueConfig& kv);

/// Overlay the keys present in `kv` onto `base`. Unknown keys for the
/// selected schema throw ConfigError.
CortexConfig apply(const KeyValueConfig& kv, CortexConfig base);
CerebellumConfig apply(const KeyValueConfig& kv, CerebellumConfig base);
BenchPlan apply(const KeyValueConfig& kv, BenchPlan base);

}  // namespace brainschema
