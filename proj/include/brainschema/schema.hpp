#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace brainschema {

using count_t = std::uint64_t;

/// Cerebral cortex parameters. Defaults reproduce the first row of the
/// cortex ranges table (21e9 neurons, 210,000 columns).
struct CortexConfig {
  std::vector<std::string> hemisphere_names{"left", "right"};
  count_t regions_per_hemisphere = 31;
  /// Optional per-hemisphere anatomical names; empty means region_01, region_02, ...
  std::vector<std::string> region_names;
  count_t total_neurons = 21'000'000'000ULL;
  count_t total_columns = 210'000;
  count_t neurons_per_microcolumn = 100;
  std::vector<std::string> layer_names{"II", "III", "IV", "V", "VI"};

  count_t hemispheres() const { return hemisphere_names.size(); }
  count_t layers() const { return layer_names.size(); }
  count_t anatomical_regions() const { return hemispheres() * regions_per_hemisphere; }
};

/// Cerebellum parameters. The module count per microzone has no published
/// value; the default makes the cerebellar region count exceed the largest
/// cortical one (2*3*10*5*4,333,334 = 1,300,000,200).
struct CerebellumConfig {
  std::vector<std::string> hemisphere_names{"left", "right"};
  count_t functional_regions = 3;
  std::vector<std::string> region_names;
  count_t lobules = 10;
  count_t microzones = 5;
  count_t modules_per_microzone = 4'333'334;
  count_t total_neurons = 100'000'000'000ULL;
  std::vector<std::string> layer_names{"molecular", "Purkinje", "granular"};

  count_t hemispheres() const { return hemisphere_names.size(); }
};

using SchemaConfig = std::variant<CortexConfig, CerebellumConfig>;

enum class Severity { warning, error };

struct Violation {
  std::string field;
  std::string message;
  Severity severity = Severity::error;

  bool operator==(const Violation&) const = default;
};

/// Empty for a valid config. Warnings do not make a config unusable.
using ValidationReport = std::vector<Violation>;

ValidationReport validate_config(const CortexConfig& config);
ValidationReport validate_config(const CerebellumConfig& config);
ValidationReport validate_config(const SchemaConfig& config);

bool has_errors(const ValidationReport& report);

/// Throws ConfigError for the first error-severity violation.
void require_valid(const ValidationReport& report);

/// Quotient and remainder of an exact integer floor division.
struct Quotient {
  count_t value = 0;
  count_t remainder = 0;

  bool exact() const { return remainder == 0; }
  bool operator==(const Quotient&) const = default;
};

/// A printed table cell that disagrees with the value derived from the
/// other cells of the same row.
struct Erratum {
  std::string field;
  count_t printed = 0;
  count_t derived = 0;
};

/// One materialized row of the cortex ranges table.
struct CortexDerived {
  count_t anatomical_regions = 0;
  count_t total_columns = 0;
  Quotient columns_per_region;
  Quotient microcolumns_per_column;
  Quotient total_microcolumns;
  count_t layers = 0;
  Quotient microcolumns_per_region;
  count_t regions_at_column_granularity = 0;
  Quotient neurons_per_column_region;
  count_t regions_at_microcolumn_granularity = 0;
  Quotient neurons_per_final_region;
  count_t total_neurons = 0;

  /// True when every neuron-bearing division is exact. Per-region quotients
  /// are floor values by definition and do not affect this flag.
  bool exact() const;

  std::optional<Erratum> erratum;
};

CortexDerived derive_cortex_row(const CortexConfig& config);

/// Number of full-depth regions: slices of microcolumns for the cortex,
/// modules for the cerebellum.
count_t total_regions(const CortexConfig& config);
count_t total_regions(const CerebellumConfig& config);
count_t total_regions(const SchemaConfig& config);

/// The eight (neurons, columns) pairs behind the published cortex table,
/// together with every value as printed.
struct PublishedCortexRow {
  count_t total_neurons;
  count_t total_columns;
  count_t columns_per_region;
  count_t microcolumns_per_column;
  count_t total_microcolumns;
  count_t layers;
  count_t microcolumns_per_region;
  count_t regions_at_column_granularity;
  count_t neurons_per_column_region;
  count_t regions_at_microcolumn_granularity;
  count_t neurons_per_final_region;
};

const std::array<PublishedCortexRow, 8>& published_cortex_rows();

/// Canonical config for one of the published rows (0-based).
CortexConfig published_cortex_config(std::size_t row);

/// The published erratum for a config, if the config is one of the
/// published rows and that row prints a cell inconsistent with its neighbours.
std::optional<Erratum> published_erratum(const CortexConfig& config);

}  // namespace brainschema
