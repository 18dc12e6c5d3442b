#include "brainschema/schema.hpp"

#include <set>
#include <string_view>

#include "brainschema/errors.hpp"

namespace brainschema {
namespace {

bool valid_segment(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (c == '/' || c == '#' || c == '\0' || c == '\n' || c == '\t' || c == ' ') return false;
  }
  return true;
}

void check_names(ValidationReport& report, const std::string& field,
                 const std::vector<std::string>& names) {
  std::set<std::string_view> seen;
  for (const auto& name : names) {
    if (!valid_segment(name)) {
      report.push_back({field, "invalid name '" + name +
                                   "' (empty, or contains '/', '#', whitespace or NUL)"});
    } else if (!seen.insert(name).second) {
      report.push_back({field, "duplicate name '" + name + "'"});
    }
  }
}

void check_positive(ValidationReport& report, const std::string& field, count_t value) {
  if (value == 0) report.push_back({field, "must be positive"});
}

void check_hemispheres(ValidationReport& report, const std::vector<std::string>& names) {
  if (names.empty()) report.push_back({"hemisphere_names", "at least one hemisphere required"});
  check_names(report, "hemisphere_names", names);
}

void check_region_names(ValidationReport& report, const std::vector<std::string>& names,
                        count_t expected) {
  if (names.empty()) return;
  if (names.size() != expected) {
    report.push_back({"region_names", "expected " + std::to_string(expected) +
                                          " names, got " + std::to_string(names.size())});
  }
  check_names(report, "region_names", names);
}

bool would_overflow_product(std::initializer_list<count_t> factors) {
  count_t acc = 1;
  for (count_t f : factors) {
    if (__builtin_mul_overflow(acc, f, &acc)) return true;
  }
  return false;
}

Quotient divide(count_t n, count_t d) { return {n / d, n % d}; }

}  // namespace

ValidationReport validate_config(const CortexConfig& c) {
  ValidationReport report;
  check_hemispheres(report, c.hemisphere_names);
  check_positive(report, "regions_per_hemisphere", c.regions_per_hemisphere);
  check_region_names(report, c.region_names, c.regions_per_hemisphere);
  check_positive(report, "total_neurons", c.total_neurons);
  check_positive(report, "total_columns", c.total_columns);
  check_positive(report, "neurons_per_microcolumn", c.neurons_per_microcolumn);
  if (c.layer_names.empty()) report.push_back({"layer_names", "at least one layer required"});
  check_names(report, "layer_names", c.layer_names);
  if (has_errors(report)) return report;

  const count_t regions = c.anatomical_regions();
  const count_t microcolumns = c.total_neurons / c.neurons_per_microcolumn;
  if (c.total_columns < regions) {
    report.push_back({"total_columns", "fewer columns (" + std::to_string(c.total_columns) +
                                           ") than anatomical regions (" +
                                           std::to_string(regions) + ")"});
  }
  if (microcolumns < c.total_columns) {
    report.push_back({"total_neurons", "fewer microcolumns (" + std::to_string(microcolumns) +
                                           ") than columns (" +
                                           std::to_string(c.total_columns) + ")"});
  }
  if (would_overflow_product({microcolumns, c.layers()})) {
    report.push_back({"layer_names", "microcolumns x layers overflows 64 bits"});
  } else if (microcolumns * c.layers() > c.total_neurons) {
    report.push_back({"layer_names", "more layer slices than neurons"});
  }
  if (const count_t r = c.total_neurons % c.neurons_per_microcolumn; r != 0) {
    report.push_back({"total_neurons",
                      "inexact division by neurons_per_microcolumn, remainder " + std::to_string(r),
                      Severity::warning});
  }
  if (const count_t r = c.neurons_per_microcolumn % c.layers(); r != 0) {
    report.push_back({"neurons_per_microcolumn",
                      "inexact division by layer count, remainder " + std::to_string(r),
                      Severity::warning});
  }
  return report;
}

ValidationReport validate_config(const CerebellumConfig& c) {
  ValidationReport report;
  check_hemispheres(report, c.hemisphere_names);
  check_positive(report, "functional_regions", c.functional_regions);
  check_region_names(report, c.region_names, c.functional_regions);
  check_positive(report, "lobules", c.lobules);
  check_positive(report, "microzones", c.microzones);
  check_positive(report, "modules_per_microzone", c.modules_per_microzone);
  check_positive(report, "total_neurons", c.total_neurons);
  if (c.layer_names.empty()) report.push_back({"layer_names", "at least one layer required"});
  check_names(report, "layer_names", c.layer_names);
  if (has_errors(report)) return report;

  if (would_overflow_product({c.hemispheres(), c.functional_regions, c.lobules, c.microzones,
                              c.modules_per_microzone})) {
    report.push_back({"modules_per_microzone", "module count overflows 64 bits"});
  } else if (total_regions(c) > c.total_neurons) {
    report.push_back({"total_neurons", "fewer neurons than modules"});
  }
  return report;
}

ValidationReport validate_config(const SchemaConfig& config) {
  return std::visit([](const auto& c) { return validate_config(c); }, config);
}

bool has_errors(const ValidationReport& report) {
  for (const auto& v : report) {
    if (v.severity == Severity::error) return true;
  }
  return false;
}

void require_valid(const ValidationReport& report) {
  for (const auto& v : report) {
    if (v.severity == Severity::error) throw ConfigError(v.field, v.message);
  }
}

bool CortexDerived::exact() const {
  return total_microcolumns.exact() && neurons_per_final_region.exact() &&
         microcolumns_per_column.exact() && neurons_per_column_region.exact();
}

CortexDerived derive_cortex_row(const CortexConfig& c) {
  require_valid(validate_config(c));

  CortexDerived d;
  d.anatomical_regions = c.anatomical_regions();
  d.total_columns = c.total_columns;
  d.layers = c.layers();
  d.total_neurons = c.total_neurons;
  d.total_microcolumns = divide(c.total_neurons, c.neurons_per_microcolumn);
  const count_t microcolumns = d.total_microcolumns.value;
  d.columns_per_region = divide(c.total_columns, d.anatomical_regions);
  d.microcolumns_per_column = divide(microcolumns, c.total_columns);
  d.microcolumns_per_region = divide(microcolumns, d.anatomical_regions);
  d.regions_at_column_granularity = c.total_columns * d.layers;
  d.neurons_per_column_region = divide(c.total_neurons, d.regions_at_column_granularity);
  d.regions_at_microcolumn_granularity = microcolumns * d.layers;
  d.neurons_per_final_region = divide(c.total_neurons, d.regions_at_microcolumn_granularity);
  d.erratum = published_erratum(c);
  return d;
}

count_t total_regions(const CortexConfig& c) {
  require_valid(validate_config(c));
  return (c.total_neurons / c.neurons_per_microcolumn) * c.layers();
}

count_t total_regions(const CerebellumConfig& c) {
  return c.hemispheres() * c.functional_regions * c.lobules * c.microzones *
         c.modules_per_microzone;
}

count_t total_regions(const SchemaConfig& config) {
  return std::visit([](const auto& c) { return total_regions(c); }, config);
}

const std::array<PublishedCortexRow, 8>& published_cortex_rows() {
  // Transcribed cell for cell, including the row-8 microcolumns-per-column
  // value (2,100) that cannot hold alongside 260,000,000 microcolumns.
  static const std::array<PublishedCortexRow, 8> rows{{
      {21'000'000'000ULL, 210'000, 3'387, 1'000, 210'000'000, 5, 3'387'096, 1'050'000, 20'000,
       1'050'000'000, 20},
      {21'000'000'000ULL, 21'000'000, 338'709, 10, 210'000'000, 5, 3'387'096, 105'000'000, 200,
       1'050'000'000, 20},
      {21'000'000'000ULL, 2'100'000, 33'870, 100, 210'000'000, 5, 3'387'096, 10'500'000, 2'000,
       1'050'000'000, 20},
      {21'000'000'000ULL, 100'000, 1'612, 2'100, 210'000'000, 5, 3'387'096, 500'000, 42'000,
       1'050'000'000, 20},
      {26'000'000'000ULL, 260'000, 4'193, 1'000, 260'000'000, 5, 4'193'548, 1'300'000, 20'000,
       1'300'000'000, 20},
      {26'000'000'000ULL, 26'000'000, 419'354, 10, 260'000'000, 5, 4'193'548, 130'000'000, 200,
       1'300'000'000, 20},
      {26'000'000'000ULL, 2'600'000, 41'935, 100, 260'000'000, 5, 4'193'548, 13'000'000, 2'000,
       1'300'000'000, 20},
      {26'000'000'000ULL, 100'000, 1'612, 2'100, 260'000'000, 5, 4'193'548, 500'000, 52'000,
       1'300'000'000, 20},
  }};
  return rows;
}

CortexConfig published_cortex_config(std::size_t row) {
  const auto& rows = published_cortex_rows();
  if (row >= rows.size()) throw ConfigError("row", "published rows are numbered 0..7");
  CortexConfig c;
  c.total_neurons = rows[row].total_neurons;
  c.total_columns = rows[row].total_columns;
  return c;
}

std::optional<Erratum> published_erratum(const CortexConfig& c) {
  if (c.anatomical_regions() != 62 || c.neurons_per_microcolumn != 100 || c.layers() != 5) {
    return std::nullopt;
  }
  for (const auto& row : published_cortex_rows()) {
    if (row.total_neurons != c.total_neurons || row.total_columns != c.total_columns) continue;
    const count_t derived = (c.total_neurons / c.neurons_per_microcolumn) / c.total_columns;
    if (derived != row.microcolumns_per_column) {
      return Erratum{"microcolumns_per_column", row.microcolumns_per_column, derived};
    }
  }
  return std::nullopt;
}

}  // namespace brainschema
