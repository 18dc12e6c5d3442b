#include "brainschema/codec.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "brainschema/errors.hpp"

namespace brainschema {
namespace {

constexpr std::array<std::string_view, kLabelDepth> kCortexLevels{
    "hemisphere", "region", "column", "microcolumn", "layer"};
constexpr std::array<std::string_view, kLabelDepth> kCerebellumLevels{
    "hemisphere", "functional region", "lobule", "microzone", "module"};

std::string default_region_name(count_t i, count_t count) {
  const int width = std::max<int>(2, static_cast<int>(std::to_string(count).size()));
  std::string digits = std::to_string(i + 1);
  return "region_" + std::string(width - std::min<int>(width, digits.size()), '0') + digits;
}

Hierarchy cortex_hierarchy(const CortexConfig& c) {
  const count_t microcolumns = c.total_neurons / c.neurons_per_microcolumn;
  return Hierarchy({c.hemispheres(), c.anatomical_regions(), c.total_columns, microcolumns,
                    microcolumns * c.layers(), c.total_neurons});
}

Hierarchy cerebellum_hierarchy(const CerebellumConfig& c) {
  const count_t regions = c.hemispheres() * c.functional_regions;
  const count_t lobules = regions * c.lobules;
  const count_t microzones = lobules * c.microzones;
  return Hierarchy({c.hemispheres(), regions, lobules, microzones,
                    microzones * c.modules_per_microzone, c.total_neurons});
}

template <typename Config>
const Config& checked(const Config& c) {
  require_valid(validate_config(c));
  return c;
}

/// Local path -> global unit at level path.size() - 1. Returns the failing
/// 0-based component on an out-of-range local index.
struct Walk {
  count_t unit = 0;
  std::optional<std::size_t> failed;
  count_t bound = 0;
};

Walk walk_down(const Hierarchy& h, const count_t* path, std::size_t depth) {
  Walk w;
  if (path[0] >= h.units(0)) return {0, 0, h.units(0)};
  w.unit = path[0];
  for (std::size_t k = 1; k < depth; ++k) {
    const count_t n = h.child_count(k - 1, w.unit);
    if (path[k] >= n) return {0, k, n};
    w.unit = h.child_begin(k - 1, w.unit) + path[k];
  }
  return w;
}

/// Global unit at `level` -> local path of length level + 1.
void walk_up(const Hierarchy& h, std::size_t level, count_t unit, count_t* path) {
  for (std::size_t k = level; k > 0; --k) {
    const count_t parent = h.owner(k - 1, unit);
    path[k] = unit - h.child_begin(k - 1, parent);
    unit = parent;
  }
  path[0] = unit;
}

void append_number(std::string& out, count_t value) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, end);
}

void append_component(std::string& out, const Schema& schema, int position, count_t local) {
  switch (position) {
    case 0:
      out += schema.hemisphere_name(local);
      return;
    case 1:
      out += schema.region_name(local);
      return;
    case 4:
      if (schema.kind() == SchemaKind::cortex) {
        out += schema.layer_names()[local];
        return;
      }
      break;
    default:
      break;
  }
  append_number(out, local + 1);
}

std::optional<count_t> parse_positive(std::string_view s) {
  if (s.empty() || s.front() == '0') return std::nullopt;
  count_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::array<count_t, kLabelDepth> address_path(const NeuronAddress& a) {
  return {a.hemisphere, a.region, a.column, a.microcolumn, a.layer};
}

}  // namespace

Schema::Schema(const CortexConfig& config)
    : kind_(SchemaKind::cortex), config_(config), hierarchy_(cortex_hierarchy(checked(config))) {
  build_names(config.hemisphere_names, config.region_names, config.regions_per_hemisphere,
              config.layer_names);
}

Schema::Schema(const CerebellumConfig& config)
    : kind_(SchemaKind::cerebellum),
      config_(config),
      hierarchy_(cerebellum_hierarchy(checked(config))) {
  build_names(config.hemisphere_names, config.region_names, config.functional_regions,
              config.layer_names);
}

Schema::Schema(const SchemaConfig& config)
    : Schema(std::holds_alternative<CortexConfig>(config)
                 ? Schema(std::get<CortexConfig>(config))
                 : Schema(std::get<CerebellumConfig>(config))) {}

void Schema::build_names(const std::vector<std::string>& hemispheres,
                         const std::vector<std::string>& regions, count_t region_count,
                         const std::vector<std::string>& layers) {
  hemispheres_ = hemispheres;
  if (regions.empty()) {
    regions_.reserve(region_count);
    for (count_t i = 0; i < region_count; ++i) regions_.push_back(default_region_name(i, region_count));
  } else {
    regions_ = regions;
  }
  layers_ = layers;
  for (count_t i = 0; i < hemispheres_.size(); ++i) hemisphere_lookup_.emplace(hemispheres_[i], i);
  for (count_t i = 0; i < regions_.size(); ++i) region_lookup_.emplace(regions_[i], i);
  for (count_t i = 0; i < layers_.size(); ++i) layer_lookup_.emplace(layers_[i], i);
}

count_t Schema::regions_at_depth(int depth) const {
  if (depth < 1 || depth > kLabelDepth) {
    throw AddressError("depth", "must be between 1 and 5, got " + std::to_string(depth));
  }
  return hierarchy_.units(depth - 1);
}

std::string_view Schema::level_name(int depth) const {
  const auto& names = kind_ == SchemaKind::cortex ? kCortexLevels : kCerebellumLevels;
  return names.at(depth - 1);
}

std::optional<count_t> Schema::find_hemisphere(std::string_view name) const {
  auto it = hemisphere_lookup_.find(std::string(name));
  if (it == hemisphere_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<count_t> Schema::find_region(std::string_view name) const {
  auto it = region_lookup_.find(std::string(name));
  if (it == region_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<count_t> Schema::find_layer(std::string_view name) const {
  auto it = layer_lookup_.find(std::string(name));
  if (it == layer_lookup_.end()) return std::nullopt;
  return it->second;
}

NeuronAddress neuron_to_address(count_t index, const Schema& schema) {
  const Hierarchy& h = schema.hierarchy();
  if (index >= h.leaves()) {
    throw AddressError("neuron", "index " + std::to_string(index) + " outside [0, " +
                                     std::to_string(h.leaves()) + ")");
  }
  const count_t slice = h.owner(kLabelDepth - 1, index);
  std::array<count_t, kLabelDepth> path{};
  walk_up(h, kLabelDepth - 1, slice, path.data());
  return {path[0], path[1], path[2], path[3], path[4],
          index - h.child_begin(kLabelDepth - 1, slice)};
}

count_t address_to_neuron(const NeuronAddress& address, const Schema& schema) {
  const Hierarchy& h = schema.hierarchy();
  const auto path = address_path(address);
  const Walk w = walk_down(h, path.data(), path.size());
  if (w.failed) {
    throw AddressError(std::string(schema.level_name(static_cast<int>(*w.failed) + 1)),
                       "index " + std::to_string(path[*w.failed]) + " out of range [0, " +
                           std::to_string(w.bound) + ")");
  }
  const count_t width = h.child_count(kLabelDepth - 1, w.unit);
  if (address.slot >= width) {
    throw AddressError("slot", "index " + std::to_string(address.slot) + " out of range [0, " +
                                   std::to_string(width) + ")");
  }
  return h.child_begin(kLabelDepth - 1, w.unit) + address.slot;
}

EncodedNeuron encode(const NeuronAddress& address, const Schema& schema) {
  // Validates every level, including the slot.
  address_to_neuron(address, schema);
  const auto path = address_path(address);
  return {RegionLabel{schema.kind(), {path.begin(), path.end()}}, address.slot};
}

std::string format_label(const RegionLabel& label, const Schema& schema) {
  if (label.path.empty() || label.depth() > kLabelDepth) {
    throw ParseError(0, "label depth must be between 1 and 5");
  }
  if (label.kind != schema.kind()) throw ParseError(0, "label belongs to a different schema");
  const Walk w = walk_down(schema.hierarchy(), label.path.data(), label.path.size());
  if (w.failed) {
    throw ParseError(*w.failed + 1, std::string(schema.level_name(*w.failed + 1)) +
                                        " index out of range");
  }
  std::string out;
  for (int i = 0; i < label.depth(); ++i) {
    if (i > 0) out += '/';
    append_component(out, schema, i, label.path[i]);
  }
  return out;
}

RegionLabel parse_label(std::string_view text, const Schema& schema) {
  RegionLabel label{schema.kind(), {}};
  const Hierarchy& h = schema.hierarchy();
  count_t unit = 0;
  std::size_t position = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = text.find('/', start);
    const std::string_view seg =
        text.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    ++position;
    if (position > kLabelDepth) throw ParseError(position, "more than 5 components");
    if (seg.empty()) throw ParseError(position, "empty component");

    std::optional<count_t> local;
    const bool named = position <= 2 || (position == 5 && schema.kind() == SchemaKind::cortex);
    if (position == 1) {
      local = schema.find_hemisphere(seg);
    } else if (position == 2) {
      local = schema.find_region(seg);
    } else if (named) {
      local = schema.find_layer(seg);
    } else if (auto v = parse_positive(seg)) {
      local = *v - 1;
    } else {
      throw ParseError(position, "'" + std::string(seg) +
                                     "' is not a positive decimal without leading zeros");
    }
    if (!local) {
      throw ParseError(position, "unknown " + std::string(schema.level_name(position)) + " '" +
                                     std::string(seg) + "'");
    }

    const count_t bound = position == 1 ? h.units(0) : h.child_count(position - 2, unit);
    if (*local >= bound) {
      throw ParseError(position, std::string(schema.level_name(position)) + " " +
                                     std::to_string(*local + 1) + " out of range 1.." +
                                     std::to_string(bound));
    }
    unit = position == 1 ? *local : h.child_begin(position - 2, unit) + *local;
    label.path.push_back(*local);

    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return label;
}

IndexRange region_neuron_range(const RegionLabel& label, const Schema& schema) {
  const count_t unit = region_ordinal(label, schema);
  const Hierarchy& h = schema.hierarchy();
  const std::size_t level = label.path.size() - 1;
  return {h.leaf_begin(level, unit), h.leaf_begin(level, unit + 1)};
}

count_t region_ordinal(const RegionLabel& label, const Schema& schema) {
  if (label.path.empty() || label.depth() > kLabelDepth) {
    throw ParseError(0, "label depth must be between 1 and 5");
  }
  if (label.kind != schema.kind()) throw ParseError(0, "label belongs to a different schema");
  const Walk w = walk_down(schema.hierarchy(), label.path.data(), label.path.size());
  if (w.failed) {
    throw ParseError(*w.failed + 1, std::string(schema.level_name(*w.failed + 1)) +
                                        " index out of range");
  }
  return w.unit;
}

RegionLabel region_at(int depth, count_t ordinal, const Schema& schema) {
  const count_t n = schema.regions_at_depth(depth);
  if (ordinal >= n) {
    throw AddressError(std::string(schema.level_name(depth)),
                       "ordinal " + std::to_string(ordinal) + " outside [0, " +
                           std::to_string(n) + ")");
  }
  RegionLabel label{schema.kind(), std::vector<count_t>(depth)};
  walk_up(schema.hierarchy(), depth - 1, ordinal, label.path.data());
  return label;
}

void append_qualified_name(std::string& out, count_t index, const Schema& schema) {
  const Hierarchy& h = schema.hierarchy();
  if (index >= h.leaves()) {
    throw AddressError("neuron", "index " + std::to_string(index) + " outside [0, " +
                                     std::to_string(h.leaves()) + ")");
  }
  const count_t slice = h.owner(kLabelDepth - 1, index);
  std::array<count_t, kLabelDepth> path{};
  walk_up(h, kLabelDepth - 1, slice, path.data());
  for (int i = 0; i < kLabelDepth; ++i) {
    if (i > 0) out += '/';
    append_component(out, schema, i, path[i]);
  }
  out += '#';
  append_number(out, index - h.child_begin(kLabelDepth - 1, slice) + 1);
}

std::string qualified_name(count_t index, const Schema& schema) {
  std::string out;
  append_qualified_name(out, index, schema);
  return out;
}

count_t parse_qualified_name(std::string_view text, const Schema& schema) {
  const std::size_t hash = text.rfind('#');
  if (hash == std::string_view::npos) throw ParseError(0, "missing '#slot' suffix");
  const RegionLabel label = parse_label(text.substr(0, hash), schema);
  if (label.depth() != kLabelDepth) {
    throw ParseError(static_cast<std::size_t>(label.depth()),
                     "a neuron name needs all 5 components");
  }
  const auto slot = parse_positive(text.substr(hash + 1));
  const IndexRange range = region_neuron_range(label, schema);
  if (!slot || *slot > range.size()) {
    throw ParseError(kLabelDepth + 1, "slot '" + std::string(text.substr(hash + 1)) +
                                          "' out of range 1.." + std::to_string(range.size()));
  }
  return range.begin + *slot - 1;
}

const std::string& cerebellar_layer(const NeuronAddress& address, const Schema& schema) {
  if (schema.kind() != SchemaKind::cerebellum) {
    throw AddressError("layer", "cell-layer lookup applies to cerebellum schemas only");
  }
  const count_t index = address_to_neuron(address, schema);
  const Hierarchy& h = schema.hierarchy();
  const count_t width = h.child_count(kLabelDepth - 1, h.owner(kLabelDepth - 1, index));
  const auto& layers = schema.layer_names();
  // Balanced split of the module's neurons; a module smaller than the layer
  // count leaves the trailing layers empty.
  const count_t parts = layers.size();
  const count_t q = width / parts;
  const count_t r = width % parts;
  const count_t big = r * (q + 1);
  const count_t layer = address.slot < big ? address.slot / (q + 1) : r + (address.slot - big) / q;
  return layers[layer];
}

RegionEnumerator::RegionEnumerator(const Schema& schema, int depth)
    : schema_(&schema), depth_(depth), end_(schema.regions_at_depth(depth)) {}

std::optional<RegionLabel> RegionEnumerator::next() {
  if (next_ >= end_) return std::nullopt;
  return region_at(depth_, next_++, *schema_);
}

RegionEnumerator::iterator::iterator(const RegionEnumerator* owner, count_t ordinal)
    : owner_(owner), ordinal_(ordinal) {
  if (ordinal_ < owner_->end_) current_ = region_at(owner_->depth_, ordinal_, *owner_->schema_);
}

RegionEnumerator::iterator& RegionEnumerator::iterator::operator++() {
  ++ordinal_;
  if (ordinal_ < owner_->end_) current_ = region_at(owner_->depth_, ordinal_, *owner_->schema_);
  return *this;
}

RegionEnumerator enumerate_regions(const Schema& schema, int depth) {
  return RegionEnumerator(schema, depth);
}

}  // namespace brainschema
