#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "brainschema/hierarchy.hpp"
#include "brainschema/schema.hpp"

namespace brainschema {

enum class SchemaKind { cortex, cerebellum };

/// Maximum number of path components in a region label.
inline constexpr int kLabelDepth = 5;

/// Structured coordinates of one neuron, all 0-based and local to the parent.
/// For the cerebellum, `region` is the functional region, `column` the lobule,
/// `microcolumn` the microzone and `layer` the module.
struct NeuronAddress {
  count_t hemisphere = 0;
  count_t region = 0;
  count_t column = 0;
  count_t microcolumn = 0;
  count_t layer = 0;
  count_t slot = 0;

  bool operator==(const NeuronAddress&) const = default;
};

/// A region at depth 1..5, stored as 0-based local indices. The text form
/// (1-based numbers, configured names) only exists at the format/parse layer.
struct RegionLabel {
  SchemaKind kind = SchemaKind::cortex;
  std::vector<count_t> path;

  int depth() const { return static_cast<int>(path.size()); }
  bool operator==(const RegionLabel&) const = default;
};

/// Half-open range of linear neuron indices.
struct IndexRange {
  count_t begin = 0;
  count_t end = 0;

  count_t size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

/// A validated config plus the partition tables and name lookups derived
/// from it. Immutable; safe to share across threads.
class Schema {
 public:
  explicit Schema(const CortexConfig& config);
  explicit Schema(const CerebellumConfig& config);
  explicit Schema(const SchemaConfig& config);

  SchemaKind kind() const { return kind_; }
  const SchemaConfig& config() const { return config_; }
  const Hierarchy& hierarchy() const { return hierarchy_; }
  count_t total_neurons() const { return hierarchy_.leaves(); }

  /// Number of regions at `depth` (1..5).
  count_t regions_at_depth(int depth) const;

  /// Human-readable level name, e.g. "column" or "lobule".
  std::string_view level_name(int depth) const;

  // Segment names for the named levels.
  const std::string& hemisphere_name(count_t i) const { return hemispheres_[i]; }
  const std::string& region_name(count_t i) const { return regions_[i]; }
  /// Cortical layer names or cerebellar cell-layer names.
  const std::vector<std::string>& layer_names() const { return layers_; }

  std::optional<count_t> find_hemisphere(std::string_view name) const;
  std::optional<count_t> find_region(std::string_view name) const;
  std::optional<count_t> find_layer(std::string_view name) const;

 private:
  void build_names(const std::vector<std::string>& hemispheres,
                   const std::vector<std::string>& regions, count_t region_count,
                   const std::vector<std::string>& layers);

  SchemaKind kind_;
  SchemaConfig config_;
  Hierarchy hierarchy_;
  std::vector<std::string> hemispheres_;
  std::vector<std::string> regions_;
  std::vector<std::string> layers_;
  std::unordered_map<std::string, count_t> hemisphere_lookup_;
  std::unordered_map<std::string, count_t> region_lookup_;
  std::unordered_map<std::string, count_t> layer_lookup_;
};

NeuronAddress neuron_to_address(count_t index, const Schema& schema);
count_t address_to_neuron(const NeuronAddress& address, const Schema& schema);

struct EncodedNeuron {
  RegionLabel label;  // full depth
  count_t slot = 0;   // 0-based position inside the final region
};

EncodedNeuron encode(const NeuronAddress& address, const Schema& schema);

std::string format_label(const RegionLabel& label, const Schema& schema);
/// Accepts 1..5 components; throws ParseError naming the failing component.
RegionLabel parse_label(std::string_view text, const Schema& schema);

IndexRange region_neuron_range(const RegionLabel& label, const Schema& schema);

/// Hierarchy-major position of a region among all regions at its depth.
count_t region_ordinal(const RegionLabel& label, const Schema& schema);
RegionLabel region_at(int depth, count_t ordinal, const Schema& schema);

/// "label#slot" with a 1-based slot, naming a single neuron.
std::string qualified_name(count_t index, const Schema& schema);
void append_qualified_name(std::string& out, count_t index, const Schema& schema);
count_t parse_qualified_name(std::string_view text, const Schema& schema);

/// Cerebellar final regions carry no layer component in their label; this
/// splits a module's neurons across the configured cell layers instead.
const std::string& cerebellar_layer(const NeuronAddress& address, const Schema& schema);

/// Lazy hierarchy-major stream of all regions at one depth. Single-consumer.
class RegionEnumerator {
 public:
  RegionEnumerator(const Schema& schema, int depth);

  count_t size() const { return end_; }
  std::optional<RegionLabel> next();

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = RegionLabel;
    using difference_type = std::ptrdiff_t;
    using pointer = const RegionLabel*;
    using reference = const RegionLabel&;

    iterator() = default;
    iterator(const RegionEnumerator* owner, count_t ordinal);
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& other) const { return ordinal_ == other.ordinal_; }

   private:
    const RegionEnumerator* owner_ = nullptr;
    count_t ordinal_ = 0;
    RegionLabel current_;
  };

  iterator begin() const { return iterator(this, next_); }
  iterator end() const { return iterator(this, end_); }

 private:
  const Schema* schema_;
  int depth_;
  count_t next_ = 0;
  count_t end_ = 0;
};

RegionEnumerator enumerate_regions(const Schema& schema, int depth);

}  // namespace brainschema
