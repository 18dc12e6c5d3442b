#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brainschema/errors.hpp"
#include "brainschema/generator.hpp"
#include "brainschema/store.hpp"

namespace brainschema {

/// Row-major key: row name, a NUL byte, column name. Names never contain NUL,
/// so all entries of one row sort contiguously.
std::string make_key(std::string_view row, std::string_view col);
/// 8-byte little-endian IEEE-754 encoding of the weight.
std::string encode_weight(double weight);
double decode_weight(std::string_view bytes);

/// In-memory sparse associative array for one batch: records sorted by key,
/// one per (row, col). A repeated pair keeps its last weight.
class SparseAssoc {
 public:
  explicit SparseAssoc(std::span<const Triple> triples);

  std::span<const Record> records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<Record> records_;
};

struct PhaseDurations {
  double for_seconds = 0.0;
  double load_seconds = 0.0;
  double ingest_seconds = 0.0;
};

/// Entries per second for the label ("for"), load and ingest phases.
struct IngestMetrics {
  count_t entries = 0;
  count_t workers = 0;
  count_t batch_size = 0;
  double for_seconds = 0.0;
  double load_seconds = 0.0;
  double ingest_seconds = 0.0;
  /// nullopt when entries > 0 but the phase duration is zero (unmeasurable).
  std::optional<double> for_rate;
  std::optional<double> load_rate;
  std::optional<double> ingest_rate;
  /// Wall clock of the whole run, including block generation.
  double wall_seconds = 0.0;
  /// Summed per-worker time spent generating blocks; not part of any rate.
  double generate_seconds = 0.0;
};

/// How phase durations are aggregated across workers.
inline constexpr std::string_view kPhaseAggregation =
    "phase_seconds = entries / sum over workers of (worker entries / worker phase busy time)";

IngestMetrics measure_rates(count_t entries, const PhaseDurations& durations);

/// A failed run. `entries_ingested()` counts entries whose batches reached the store.
class IngestError : public Error {
 public:
  IngestError(const std::string& message, count_t entries_ingested)
      : Error(message), entries_ingested_(entries_ingested) {}
  count_t entries_ingested() const noexcept { return entries_ingested_; }

 private:
  count_t entries_ingested_;
};

/// Labels, loads and ingests every entry of `blocks` with `workers` threads.
///
/// The concatenated entry stream of all blocks is split into `workers`
/// contiguous, balanced ranges; each worker generates the blocks it touches
/// and runs all three phases on its own batches. The store is the only
/// shared object.
IngestMetrics run_ingest(std::span<const BlockSpec> blocks, const Schema& schema, count_t workers,
                         count_t batch_size, Store& store);

inline constexpr count_t kDefaultBatchSize = 10'000;

}  // namespace brainschema
