#pragma once

// Test-only reference implementations. They build the hierarchy by explicit
// nested enumeration with running counters and share no code with the
// closed-form partition arithmetic in the library.

#include <cstdint>
#include <string>
#include <vector>

#include "brainschema/codec.hpp"

namespace brainschema::oracle {

/// n children dealt to k parents, the first n % k parents taking one extra.
inline std::vector<count_t> split(count_t n, count_t k) {
  std::vector<count_t> counts(k, n / k);
  for (count_t i = 0; i < n % k; ++i) ++counts[i];
  return counts;
}

struct Neuron {
  NeuronAddress address;
  std::string name;  // "label#slot", 1-based numbers and slot
};

inline std::string region_name(count_t i) {
  return std::string("region_") + (i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
}

/// Every neuron of a small cortex config in hierarchy-major order.
inline std::vector<Neuron> enumerate_cortex(const CortexConfig& c) {
  const count_t regions = c.hemispheres() * c.regions_per_hemisphere;
  const count_t microcolumns = c.total_neurons / c.neurons_per_microcolumn;
  const auto columns_of = split(c.total_columns, regions);
  const auto microcolumns_of = split(microcolumns, c.total_columns);
  const auto neurons_of = split(c.total_neurons, microcolumns * c.layers());

  std::vector<Neuron> out;
  count_t column = 0, microcolumn = 0, slice = 0;
  for (count_t h = 0; h < c.hemispheres(); ++h) {
    for (count_t r = 0; r < c.regions_per_hemisphere; ++r) {
      const count_t g = h * c.regions_per_hemisphere + r;
      for (count_t col = 0; col < columns_of[g]; ++col, ++column) {
        for (count_t mc = 0; mc < microcolumns_of[column]; ++mc, ++microcolumn) {
          for (count_t layer = 0; layer < c.layers(); ++layer, ++slice) {
            for (count_t slot = 0; slot < neurons_of[slice]; ++slot) {
              const std::string region =
                  c.region_names.empty() ? region_name(r) : c.region_names[r];
              out.push_back({{h, r, col, mc, layer, slot},
                             c.hemisphere_names[h] + "/" + region + "/" + std::to_string(col + 1) +
                                 "/" + std::to_string(mc + 1) + "/" + c.layer_names[layer] + "#" +
                                 std::to_string(slot + 1)});
            }
          }
        }
      }
    }
  }
  return out;
}

inline std::vector<Neuron> enumerate_cerebellum(const CerebellumConfig& c) {
  const count_t modules = c.hemispheres() * c.functional_regions * c.lobules * c.microzones *
                          c.modules_per_microzone;
  const auto neurons_of = split(c.total_neurons, modules);
  std::vector<Neuron> out;
  count_t module = 0;
  for (count_t h = 0; h < c.hemispheres(); ++h) {
    for (count_t f = 0; f < c.functional_regions; ++f) {
      for (count_t l = 0; l < c.lobules; ++l) {
        for (count_t z = 0; z < c.microzones; ++z) {
          for (count_t m = 0; m < c.modules_per_microzone; ++m, ++module) {
            for (count_t slot = 0; slot < neurons_of[module]; ++slot) {
              const std::string region =
                  c.region_names.empty() ? region_name(f) : c.region_names[f];
              out.push_back({{h, f, l, z, m, slot},
                             c.hemisphere_names[h] + "/" + region + "/" + std::to_string(l + 1) +
                                 "/" + std::to_string(z + 1) + "/" + std::to_string(m + 1) + "#" +
                                 std::to_string(slot + 1)});
            }
          }
        }
      }
    }
  }
  return out;
}

/// The 160-neuron config used throughout the examples: 2 hemispheres x 2
/// regions, 8 columns, 10 neurons per microcolumn, 5 layers.
inline CortexConfig tiny_cortex() {
  CortexConfig c;
  c.regions_per_hemisphere = 2;
  c.total_columns = 8;
  c.total_neurons = 160;
  c.neurons_per_microcolumn = 10;
  return c;
}

/// Minimal XML well-formedness check: balanced, properly nested tags,
/// quoted attributes, no stray '<' or '&'.
inline bool well_formed_xml(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < text.size()) {
    if (text[i] == '&') {
      const auto semi = text.find(';', i);
      if (semi == std::string::npos || semi - i > 8) return false;
      i = semi + 1;
      continue;
    }
    if (text[i] != '<') {
      ++i;
      continue;
    }
    const auto close = text.find('>', i);
    if (close == std::string::npos) return false;
    std::string tag = text.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.starts_with("?")) {
      if (!tag.ends_with("?")) return false;
      continue;
    }
    if (tag.starts_with("!--")) continue;
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.ends_with("/");
    if (self_closing) tag.pop_back();
    const auto name_end = tag.find_first_of(" \t\n");
    const std::string name = tag.substr(0, name_end);
    if (name.empty()) return false;
    // Attributes must be name="value" pairs with no '<' inside.
    std::size_t quotes = 0;
    for (char c : tag) {
      if (c == '"') ++quotes;
      if (c == '<') return false;
    }
    if (quotes % 2 != 0) return false;
    if (stack.empty()) {
      if (root_seen) return false;
      root_seen = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  return root_seen && stack.empty();
}

}  // namespace brainschema::oracle
