#include "brainschema/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "brainschema/bench.hpp"
#include "brainschema/errors.hpp"

namespace brainschema {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

const std::set<std::string> kCommonKeys{"schema", "hemisphere_names", "region_names",
                                        "total_neurons", "layer_names"};
const std::set<std::string> kCortexKeys{"regions_per_hemisphere", "total_columns",
                                        "neurons_per_microcolumn"};
const std::set<std::string> kCerebellumKeys{"functional_regions", "lobules", "microzones",
                                            "modules_per_microzone"};
const std::set<std::string> kBenchKeys{"entry_counts", "worker_counts", "trials",
                                       "backend", "seed", "batch_size",
                                       "block_dim", "max_block_entries", "work_dir"};

void reject_unknown(const KeyValueConfig& kv, const std::set<std::string>& schema_keys) {
  for (const auto& [key, value] : kv.values()) {
    if (kCommonKeys.count(key) || schema_keys.count(key) || kBenchKeys.count(key)) continue;
    const bool other_schema = kCortexKeys.count(key) || kCerebellumKeys.count(key);
    throw ConfigError(key, other_schema ? "not valid for the selected schema" : "unknown key");
  }
}

template <typename Fn>
void with(const KeyValueConfig& kv, const std::string& key, Fn&& fn) {
  if (auto v = kv.get(key)) fn(*v);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw FormatError(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.empty()) throw FormatError(line_no, "empty key");
    kv.values_[key] = trim(std::string_view(content).substr(eq + 1));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

count_t parse_count(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  count_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<count_t> parse_count_list(const std::string& field, const std::string& text) {
  std::vector<count_t> out;
  for (const auto& item : parse_name_list(field, text)) out.push_back(parse_count(field, item));
  return out;
}

std::vector<std::string> parse_name_list(const std::string& field, const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    std::string item = trim(std::string_view(text).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw ConfigError(field, "empty list item in '" + text + "'");
    out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string schema_kind(const KeyValueConfig& kv) {
  const std::string kind = kv.get("schema").value_or("cortex");
  if (kind != "cortex" && kind != "cerebellum") {
    throw ConfigError("schema", "expected 'cortex' or 'cerebellum', got '" + kind + "'");
  }
  return kind;
}

CortexConfig apply(const KeyValueConfig& kv, CortexConfig c) {
  reject_unknown(kv, kCortexKeys);
  with(kv, "hemisphere_names", [&](const auto& v) { c.hemisphere_names = parse_name_list("hemisphere_names", v); });
  with(kv, "region_names", [&](const auto& v) { c.region_names = parse_name_list("region_names", v); });
  with(kv, "layer_names", [&](const auto& v) { c.layer_names = parse_name_list("layer_names", v); });
  with(kv, "total_neurons", [&](const auto& v) { c.total_neurons = parse_count("total_neurons", v); });
  with(kv, "regions_per_hemisphere", [&](const auto& v) { c.regions_per_hemisphere = parse_count("regions_per_hemisphere", v); });
  with(kv, "total_columns", [&](const auto& v) { c.total_columns = parse_count("total_columns", v); });
  with(kv, "neurons_per_microcolumn", [&](const auto& v) { c.neurons_per_microcolumn = parse_count("neurons_per_microcolumn", v); });
  return c;
}

CerebellumConfig apply(const KeyValueConfig& kv, CerebellumConfig c) {
  reject_unknown(kv, kCerebellumKeys);
  with(kv, "hemisphere_names", [&](const auto& v) { c.hemisphere_names = parse_name_list("hemisphere_names", v); });
  with(kv, "region_names", [&](const auto& v) { c.region_names = parse_name_list("region_names", v); });
  with(kv, "layer_names", [&](const auto& v) { c.layer_names = parse_name_list("layer_names", v); });
  with(kv, "total_neurons", [&](const auto& v) { c.total_neurons = parse_count("total_neurons", v); });
  with(kv, "functional_regions", [&](const auto& v) { c.functional_regions = parse_count("functional_regions", v); });
  with(kv, "lobules", [&](const auto& v) { c.lobules = parse_count("lobules", v); });
  with(kv, "microzones", [&](const auto& v) { c.microzones = parse_count("microzones", v); });
  with(kv, "modules_per_microzone", [&](const auto& v) { c.modules_per_microzone = parse_count("modules_per_microzone", v); });
  return c;
}

BenchPlan apply(const KeyValueConfig& kv, BenchPlan p) {
  if (schema_kind(kv) == "cortex") {
    const CortexConfig* base = std::get_if<CortexConfig>(&p.schema);
    p.schema = apply(kv, base ? *base : CortexConfig{});
  } else {
    const CerebellumConfig* base = std::get_if<CerebellumConfig>(&p.schema);
    p.schema = apply(kv, base ? *base : CerebellumConfig{});
  }
  with(kv, "entry_counts", [&](const auto& v) { p.entry_counts = parse_count_list("entry_counts", v); });
  with(kv, "worker_counts", [&](const auto& v) { p.worker_counts = parse_count_list("worker_counts", v); });
  with(kv, "trials", [&](const auto& v) { p.trials = parse_count("trials", v); });
  with(kv, "seed", [&](const auto& v) { p.seed = parse_count("seed", v); });
  with(kv, "batch_size", [&](const auto& v) { p.batch_size = parse_count("batch_size", v); });
  with(kv, "block_dim", [&](const auto& v) { p.block_dim = parse_count("block_dim", v); });
  with(kv, "max_block_entries", [&](const auto& v) { p.max_block_entries = parse_count("max_block_entries", v); });
  with(kv, "work_dir", [&](const auto& v) { p.work_dir = v; });
  with(kv, "backend", [&](const std::string& v) {
    if (v == "memory" || v == "mem") {
      p.backend = Backend::memory;
    } else if (v == "durable" || v == "disk") {
      p.backend = Backend::durable;
    } else {
      throw ConfigError("backend", "expected mem|disk, got '" + v + "'");
    }
  });
  return p;
}

}  // namespace brainschema
