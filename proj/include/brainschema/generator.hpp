#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brainschema/codec.hpp"

namespace brainschema {

/// One dim x dim tile of the global neuron-by-neuron adjacency matrix.
struct BlockSpec {
  count_t block_row = 0;
  count_t block_col = 0;
  count_t dim = 0;
  double sparsity = 0.0;  // in (0, 1]
  std::uint64_t seed = 0;

  count_t row_offset() const { return block_row * dim; }
  count_t col_offset() const { return block_col * dim; }
  bool operator==(const BlockSpec&) const = default;
};

/// round(dim^2 * sparsity). Throws SpecError for an invalid spec.
count_t block_nnz(const BlockSpec& spec);

void validate_block(const BlockSpec& spec);
/// Also checks that the block lies inside the schema's neuron space.
void validate_block(const BlockSpec& spec, const Schema& schema);

struct LocalEntry {
  count_t row = 0;
  count_t col = 0;
  double weight = 0.0;

  bool operator==(const LocalEntry&) const = default;
};

/// Exactly block_nnz(spec) distinct positions in row-major order, weights
/// uniform on (0, 1]. Identical specs give identical output on every host.
std::vector<LocalEntry> generate_block(const BlockSpec& spec);

/// One nonzero adjacency entry between two fully qualified neuron names.
struct Triple {
  std::string row;
  std::string col;
  double weight = 0.0;

  bool operator==(const Triple&) const = default;
};

/// Maps block-local entries to global neuron indices and then to
/// "label#slot" names. Output order follows input order.
std::vector<Triple> label_triples(std::span<const LocalEntry> entries, const BlockSpec& spec,
                                  const Schema& schema);

/// Deterministic 64-bit mixer for deriving per-block seeds from a run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Lays out blocks of edge `dim` holding exactly `entries` triples in total,
/// at most `max_per_block` each. Blocks form a chain (i, i + 1) of
/// off-diagonal tiles, like consecutive layers of a feed-forward network.
std::vector<BlockSpec> plan_blocks(count_t entries, count_t dim, count_t max_per_block,
                                   std::uint64_t seed, const Schema& schema);

}  // namespace brainschema
