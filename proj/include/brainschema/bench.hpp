#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "brainschema/errors.hpp"
#include "brainschema/ingest.hpp"
#include "brainschema/schema.hpp"

namespace brainschema {

enum class Backend { memory, durable };

struct BenchPlan {
  std::vector<count_t> entry_counts{500'000, 1'000'000, 5'000'000};
  std::vector<count_t> worker_counts{1, 2, 4, 8};
  count_t trials = 3;
  Backend backend = Backend::durable;
  std::uint64_t seed = 1;
  count_t batch_size = kDefaultBatchSize;
  count_t block_dim = 10'000;
  count_t max_block_entries = 250'000;
  /// Scratch directory for the durable backend; empty means a fresh temp directory.
  std::filesystem::path work_dir;
  /// Neuron space the triples are labeled in.
  SchemaConfig schema{CortexConfig{}};

  /// 50M/100M/500M entries over 1, 2, 4, 6, ..., 18 ingest workers.
  static BenchPlan paper_preset();
  count_t cells() const { return entry_counts.size() * worker_counts.size() * trials; }
};

void validate_plan(const BenchPlan& plan);

std::string_view backend_name(Backend backend);

struct BenchResultRow {
  count_t entries = 0;
  count_t workers = 0;
  count_t trial = 0;  // 1-based
  double for_rate = 0.0;
  double load_rate = 0.0;
  double ingest_rate = 0.0;
  double total_seconds = 0.0;

  bool operator==(const BenchResultRow&) const = default;
};

/// A sweep that stopped early; `rows()` holds every completed cell.
class SweepError : public Error {
 public:
  SweepError(const std::string& message, std::vector<BenchResultRow> rows)
      : Error(message), rows_(std::move(rows)) {}
  const std::vector<BenchResultRow>& rows() const noexcept { return rows_; }

 private:
  std::vector<BenchResultRow> rows_;
};

using SweepProgress = std::function<void(const BenchResultRow&, const IngestMetrics&)>;

/// One cell per (entries, workers, trial), entries outermost, on a fresh
/// store each time. The blocks of a cell depend only on (entries, seed).
std::vector<BenchResultRow> run_sweep(const BenchPlan& plan, const SweepProgress& progress = {});

inline constexpr std::string_view kCsvHeader =
    "entries,workers,trial,for_rate,load_rate,ingest_rate,total_seconds";

std::string emit_csv(const std::vector<BenchResultRow>& rows);
std::vector<BenchResultRow> parse_csv(std::string_view text);

struct PlotOptions {
  /// One set of three series per entry count instead of averaging over them.
  bool per_entry_count = false;
};

/// SVG line chart of the mean rates against worker count.
std::string emit_plot(const std::vector<BenchResultRow>& rows, const PlotOptions& options = {});

struct RatePoint {
  count_t workers = 0;
  double for_rate = 0.0;
  double load_rate = 0.0;
  double ingest_rate = 0.0;
};

/// Mean over trials and entry counts for each worker count, ascending.
std::vector<RatePoint> mean_rates_by_workers(const std::vector<BenchResultRow>& rows);

enum class SmokeStatus { pass, warn, skipped };

struct SmokeCheck {
  std::string name;
  SmokeStatus status = SmokeStatus::pass;
  std::string detail;
};

/// Hardware-dependent expectations: ingest scales from 1 to 8 workers on a
/// host with at least 4 hardware threads, and the load rate is not the
/// bottleneck (load >= ingest at every worker count). Never fatal.
std::vector<SmokeCheck> smoke_checks(const std::vector<BenchResultRow>& rows,
                                     unsigned hardware_threads);

}  // namespace brainschema
