#include <doctest.h>

#include <random>
#include <set>

#include "brainschema/codec.hpp"
#include "brainschema/errors.hpp"
#include "oracles.hpp"

using namespace brainschema;

namespace {

std::string label_of(const std::string& qualified) { return qualified.substr(0, qualified.find('#')); }

CortexConfig random_cortex(std::mt19937_64& rng) {
  CortexConfig c;
  c.regions_per_hemisphere = 1 + rng() % 4;
  const count_t regions = 2 * c.regions_per_hemisphere;
  c.total_columns = regions + rng() % 10;
  c.neurons_per_microcolumn = 1 + rng() % 12;
  c.layer_names.resize(1 + rng() % 5);
  for (std::size_t i = 0; i < c.layer_names.size(); ++i) c.layer_names[i] = "L" + std::to_string(i + 1);
  // Enough neurons that every slice is non-empty, with arbitrary remainders.
  const count_t microcolumns = c.total_columns + rng() % 30;
  const count_t min_neurons =
      std::max(microcolumns * c.neurons_per_microcolumn, microcolumns * c.layers());
  c.total_neurons = min_neurons + rng() % c.neurons_per_microcolumn;
  if (c.total_neurons / c.neurons_per_microcolumn * c.layers() > c.total_neurons) {
    c.neurons_per_microcolumn = c.layers();
    c.total_neurons = microcolumns * c.layers();
  }
  return c;
}

}  // namespace

TEST_CASE("tiny config matches the enumeration oracle at every index") {
  const CortexConfig config = oracle::tiny_cortex();
  const Schema schema(config);
  const auto neurons = oracle::enumerate_cortex(config);
  REQUIRE(neurons.size() == 160);
  for (count_t i = 0; i < neurons.size(); ++i) {
    CAPTURE(i);
    CHECK(neuron_to_address(i, schema) == neurons[i].address);
    CHECK(address_to_neuron(neurons[i].address, schema) == i);
    CHECK(qualified_name(i, schema) == neurons[i].name);
    CHECK(parse_qualified_name(neurons[i].name, schema) == i);
  }
}

TEST_CASE("worked examples on the tiny config") {
  const Schema schema(oracle::tiny_cortex());
  CHECK(neuron_to_address(0, schema) == NeuronAddress{0, 0, 0, 0, 0, 0});
  CHECK(neuron_to_address(10, schema) == NeuronAddress{0, 0, 0, 1, 0, 0});
  CHECK(neuron_to_address(80, schema) == NeuronAddress{1, 0, 0, 0, 0, 0});
  CHECK(address_to_neuron({1, 0, 0, 0, 0, 0}, schema) == 80);

  const EncodedNeuron first = encode({0, 0, 0, 0, 0, 0}, schema);
  CHECK(format_label(first.label, schema) == "left/region_01/1/1/II");
  CHECK(first.slot == 0);

  const EncodedNeuron last = encode(neuron_to_address(159, schema), schema);
  CHECK(format_label(last.label, schema) == "right/region_02/2/2/VI");
  CHECK(last.slot == 1);

  CHECK(region_neuron_range(parse_label("left", schema), schema) == IndexRange{0, 80});
  CHECK(region_neuron_range(parse_label("left/region_01/1/1/II", schema), schema) == IndexRange{0, 2});
}

TEST_CASE("address errors name the level") {
  const Schema schema(oracle::tiny_cortex());
  CHECK_THROWS_AS(neuron_to_address(160, schema), AddressError);
  try {
    address_to_neuron({0, 0, 2, 0, 0, 0}, schema);
    FAIL("expected AddressError");
  } catch (const AddressError& e) {
    CHECK(e.level() == "column");
  }
  try {
    address_to_neuron({0, 0, 0, 0, 0, 2}, schema);
    FAIL("expected AddressError");
  } catch (const AddressError& e) {
    CHECK(e.level() == "slot");
  }
  CHECK_THROWS_AS(encode({0, 0, 0, 0, 5, 0}, schema), AddressError);
}

TEST_CASE("parse_label") {
  const Schema schema(oracle::tiny_cortex());
  const RegionLabel full = parse_label("left/region_01/1/1/II", schema);
  CHECK(full.depth() == 5);
  CHECK(full.path == std::vector<count_t>{0, 0, 0, 0, 0});
  CHECK(parse_label("left/region_01", schema).depth() == 2);

  const auto fails_at = [&](std::string_view text) -> std::size_t {
    try {
      parse_label(text, schema);
    } catch (const ParseError& e) {
      return e.component();
    }
    return 0;
  };
  CHECK(fails_at("left/region_01/9/1/II") == 3);
  CHECK(fails_at("middle") == 1);
  CHECK(fails_at("left/region_03") == 2);
  CHECK(fails_at("left/region_01/01") == 3);  // leading zero
  CHECK(fails_at("left/region_01/0") == 3);
  CHECK(fails_at("left/region_01/+1") == 3);
  CHECK(fails_at("left//1") == 2);
  CHECK(fails_at("left/region_01/1/1/I") == 5);
  CHECK(fails_at("left/region_01/1/1/II/x") == 6);
  CHECK(fails_at("") == 1);
  CHECK(fails_at("left/") == 2);
  CHECK(fails_at("left/region_01/1/99999999999999999999999") == 4);
}

TEST_CASE("every depth tiles the tiny neuron space and formats round-trip") {
  const Schema schema(oracle::tiny_cortex());
  const count_t expected_counts[] = {2, 4, 8, 16, 80};
  for (int depth = 1; depth <= 5; ++depth) {
    CAPTURE(depth);
    auto stream = enumerate_regions(schema, depth);
    CHECK(stream.size() == expected_counts[depth - 1]);
    std::vector<int> cover(160, 0);
    count_t next_begin = 0;
    count_t n = 0;
    for (const RegionLabel& label : stream) {
      const std::string text = format_label(label, schema);
      CHECK(parse_label(text, schema) == label);
      CHECK(region_ordinal(label, schema) == n);
      const IndexRange r = region_neuron_range(label, schema);
      CHECK(r.begin == next_begin);  // monotone and abutting
      CHECK(r.size() > 0);
      for (count_t i = r.begin; i < r.end; ++i) ++cover[i];
      next_begin = r.end;
      ++n;
    }
    CHECK(n == stream.size());
    CHECK(next_begin == 160);
    for (int c : cover) CHECK(c == 1);
  }
}

TEST_CASE("region ranges agree with the oracle's label prefixes") {
  const CortexConfig config = oracle::tiny_cortex();
  const Schema schema(config);
  const auto neurons = oracle::enumerate_cortex(config);
  for (const RegionLabel& label : enumerate_regions(schema, 5)) {
    const std::string text = format_label(label, schema);
    const IndexRange r = region_neuron_range(label, schema);
    for (count_t i = 0; i < neurons.size(); ++i) {
      CHECK((label_of(neurons[i].name) == text) == (i >= r.begin && i < r.end));
    }
  }
}

TEST_CASE("a prefix range is the union of its children's ranges") {
  const Schema schema(oracle::tiny_cortex());
  for (int depth = 1; depth < 5; ++depth) {
    auto children = enumerate_regions(schema, depth + 1);
    for (const RegionLabel& parent : enumerate_regions(schema, depth)) {
      const IndexRange pr = region_neuron_range(parent, schema);
      count_t begin = UINT64_MAX, end = 0, width = 0;
      for (const RegionLabel& child : children) {
        if (!std::equal(parent.path.begin(), parent.path.end(), child.path.begin())) continue;
        const IndexRange cr = region_neuron_range(child, schema);
        begin = std::min(begin, cr.begin);
        end = std::max(end, cr.end);
        width += cr.size();
      }
      CHECK(begin == pr.begin);
      CHECK(end == pr.end);
      CHECK(width == pr.size());
    }
  }
}

TEST_CASE("random small configs with inexact divisions stay bijective and match the oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const CortexConfig config = random_cortex(rng);
    CAPTURE(config.total_neurons);
    CAPTURE(config.total_columns);
    CAPTURE(config.neurons_per_microcolumn);
    REQUIRE_FALSE(has_errors(validate_config(config)));
    const Schema schema(config);
    const auto neurons = oracle::enumerate_cortex(config);
    REQUIRE(neurons.size() == config.total_neurons);
    for (count_t i = 0; i < neurons.size(); ++i) {
      const NeuronAddress a = neuron_to_address(i, schema);
      REQUIRE(a == neurons[i].address);
      REQUIRE(address_to_neuron(a, schema) == i);
      REQUIRE(qualified_name(i, schema) == neurons[i].name);
    }
    // Child counts differ by at most one at every level.
    const Hierarchy& h = schema.hierarchy();
    for (std::size_t level = 0; level + 1 < h.levels(); ++level) {
      count_t lo = UINT64_MAX, hi = 0;
      for (count_t u = 0; u < h.units(level); ++u) {
        lo = std::min(lo, h.child_count(level, u));
        hi = std::max(hi, h.child_count(level, u));
      }
      CHECK(lo >= 1);
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("canonical config: random indices round-trip and final regions hold 20 neurons") {
  const Schema schema(CortexConfig{});
  CHECK(schema.total_neurons() == 21'000'000'000ULL);
  CHECK(enumerate_regions(schema, 5).size() == 1'050'000'000);
  CHECK(qualified_name(0, schema) == "left/region_01/1/1/II#1");
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100'000; ++i) {
    const count_t index = rng() % schema.total_neurons();
    const NeuronAddress a = neuron_to_address(index, schema);
    REQUIRE(address_to_neuron(a, schema) == index);
    const EncodedNeuron e = encode(a, schema);
    REQUIRE(region_neuron_range(e.label, schema).size() == 20);
  }
}

TEST_CASE("named regions and custom hemisphere names") {
  CortexConfig c = oracle::tiny_cortex();
  c.hemisphere_names = {"lh", "rh"};
  c.region_names = {"frontal", "occipital"};
  const Schema schema(c);
  CHECK(qualified_name(159, schema) == "rh/occipital/2/2/VI#2");
  CHECK(parse_label("lh/frontal/2", schema).path == std::vector<count_t>{0, 0, 1});
  CHECK_THROWS_AS(parse_label("left", schema), ParseError);
}

TEST_CASE("cerebellum labels end at the module") {
  CerebellumConfig c;
  c.modules_per_microzone = 2;
  c.total_neurons = 2 * 3 * 10 * 5 * 2 * 7 + 11;  // inexact: 11 modules get one extra neuron
  const Schema schema(c);
  const auto neurons = oracle::enumerate_cerebellum(c);
  REQUIRE(neurons.size() == c.total_neurons);
  for (count_t i = 0; i < neurons.size(); ++i) {
    REQUIRE(neuron_to_address(i, schema) == neurons[i].address);
    REQUIRE(qualified_name(i, schema) == neurons[i].name);
  }
  CHECK(qualified_name(0, schema) == "left/region_01/1/1/1#1");
  CHECK(enumerate_regions(schema, 5).size() == 600);
  CHECK(parse_label("right/region_03/10/5/2", schema).depth() == 5);
  CHECK_THROWS_AS(parse_label("right/region_03/10/5/3", schema), ParseError);
  CHECK_THROWS_AS(parse_label("right/region_03/10/5/II", schema), ParseError);
  CHECK(schema.level_name(3) == "lobule");

  // First module has 8 neurons: layers get 3, 3, 2.
  std::vector<std::string> layers;
  for (count_t slot = 0; slot < 8; ++slot) {
    layers.push_back(cerebellar_layer({0, 0, 0, 0, 0, slot}, schema));
  }
  CHECK(layers == std::vector<std::string>{"molecular", "molecular", "molecular", "Purkinje",
                                           "Purkinje", "Purkinje", "granular", "granular"});
}

TEST_CASE("enumeration is lazy at full scale") {
  const Schema schema(CortexConfig{});
  auto stream = enumerate_regions(schema, 5);
  CHECK(stream.size() == 1'050'000'000);
  count_t seen = 0;
  while (auto l = stream.next()) {
    if (++seen == 1000) break;
  }
  CHECK(seen == 1000);
  CHECK(format_label(region_at(5, 1'049'999'999, schema), schema) == "right/region_31/3387/1000/VI");
  CHECK_THROWS_AS(enumerate_regions(schema, 0), AddressError);
  CHECK_THROWS_AS(enumerate_regions(schema, 6), AddressError);
}

TEST_CASE("hierarchy partition arithmetic") {
  const Hierarchy h({3, 10, 10});
  // 10 children over 3 parents: 4, 3, 3
  CHECK(h.child_count(0, 0) == 4);
  CHECK(h.child_count(0, 1) == 3);
  CHECK(h.child_count(0, 2) == 3);
  CHECK(h.owner(0, 3) == 0);
  CHECK(h.owner(0, 4) == 1);
  CHECK(h.owner(0, 9) == 2);
  CHECK(h.leaf_begin(0, 3) == 10);
  CHECK_THROWS_AS(Hierarchy({3, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Hierarchy({0, 2}), std::invalid_argument);
}
