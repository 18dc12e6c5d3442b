#include "brainschema/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "brainschema/errors.hpp"

namespace brainschema {
namespace {

// Largest edge whose squared size is exactly representable in a double.
constexpr count_t kMaxDim = 94'906'265;

__extension__ using u128 = unsigned __int128;

/// Uniform integer in [0, bound] from a 64-bit engine (Lemire's method).
/// Standard distributions are implementation-defined; this one is not.
std::uint64_t uniform_upto(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == UINT64_MAX) return rng();
  const std::uint64_t range = bound + 1;
  u128 m = static_cast<u128>(rng()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform on (0, 1] with 53 bits of resolution; never zero.
double unit_weight(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

void validate_block(const BlockSpec& spec) {
  if (spec.dim == 0) throw SpecError("block dim must be positive");
  if (spec.dim > kMaxDim) {
    throw SpecError("block dim " + std::to_string(spec.dim) + " exceeds " + std::to_string(kMaxDim));
  }
  if (!(spec.sparsity > 0.0 && spec.sparsity <= 1.0)) {
    throw SpecError("sparsity must lie in (0, 1], got " + std::to_string(spec.sparsity));
  }
}

void validate_block(const BlockSpec& spec, const Schema& schema) {
  validate_block(spec);
  const count_t n = schema.total_neurons();
  const auto fits = [&](count_t block) {
    return block < n / spec.dim;  // (block + 1) * dim <= n without overflow
  };
  if (!fits(spec.block_row) || !fits(spec.block_col)) {
    throw AddressError("block", "block (" + std::to_string(spec.block_row) + ", " +
                                    std::to_string(spec.block_col) + ") of edge " +
                                    std::to_string(spec.dim) + " leaves the neuron space [0, " +
                                    std::to_string(n) + ")");
  }
}

count_t block_nnz(const BlockSpec& spec) {
  validate_block(spec);
  const double cells = static_cast<double>(spec.dim) * static_cast<double>(spec.dim);
  return static_cast<count_t>(std::llround(cells * spec.sparsity));
}

std::vector<LocalEntry> generate_block(const BlockSpec& spec) {
  const count_t nnz = block_nnz(spec);
  const count_t cells = spec.dim * spec.dim;
  std::mt19937_64 rng(spec.seed);

  // Floyd's selection of nnz distinct cells from [0, cells).
  std::unordered_set<count_t> chosen;
  chosen.reserve(nnz);
  std::vector<count_t> positions;
  positions.reserve(nnz);
  for (count_t j = cells - nnz; j < cells; ++j) {
    const count_t t = uniform_upto(rng, j);
    const count_t pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    positions.push_back(pick);
  }
  std::sort(positions.begin(), positions.end());

  std::vector<LocalEntry> entries;
  entries.reserve(nnz);
  for (count_t p : positions) {
    entries.push_back({p / spec.dim, p % spec.dim, unit_weight(rng)});
  }
  return entries;
}

std::vector<Triple> label_triples(std::span<const LocalEntry> entries, const BlockSpec& spec,
                                  const Schema& schema) {
  const count_t n = schema.total_neurons();
  std::vector<Triple> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    const count_t row = spec.row_offset() + e.row;
    const count_t col = spec.col_offset() + e.col;
    if (row >= n || col >= n) {
      throw AddressError("neuron", "global index (" + std::to_string(row) + ", " +
                                       std::to_string(col) + ") outside [0, " + std::to_string(n) +
                                       ")");
    }
    Triple t;
    t.row.reserve(40);
    t.col.reserve(40);
    append_qualified_name(t.row, row, schema);
    append_qualified_name(t.col, col, schema);
    t.weight = e.weight;
    out.push_back(std::move(t));
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined input
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<BlockSpec> plan_blocks(count_t entries, count_t dim, count_t max_per_block,
                                   std::uint64_t seed, const Schema& schema) {
  if (max_per_block == 0) throw SpecError("max_per_block must be positive");
  std::vector<BlockSpec> blocks;
  if (entries == 0) return blocks;
  validate_block({0, 0, dim, 1.0, 0});
  const count_t cells = dim * dim;
  const count_t per_block = std::min(max_per_block, cells);
  const count_t count = (entries + per_block - 1) / per_block;
  blocks.reserve(count);
  for (count_t i = 0; i < count; ++i) {
    const count_t want = entries / count + (i < entries % count ? 1 : 0);
    BlockSpec spec{i, i + 1, dim, static_cast<double>(want) / static_cast<double>(cells),
                   mix_seed(seed, i)};
    // The quotient can land one ulp off; walk it until the count is exact.
    while (block_nnz(spec) < want) spec.sparsity = std::nextafter(spec.sparsity, 2.0);
    while (block_nnz(spec) > want) spec.sparsity = std::nextafter(spec.sparsity, 0.0);
    validate_block(spec, schema);
    blocks.push_back(spec);
  }
  return blocks;
}

}  // namespace brainschema
