#include "brainschema/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace brainschema {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct WorkerStats {
  count_t entries = 0;
  double for_busy = 0.0;
  double load_busy = 0.0;
  double ingest_busy = 0.0;
  double generate_busy = 0.0;
};

/// entries / sum(e_w / busy_w); 0 when some worker did work in no measurable time.
double aggregate_seconds(count_t entries, const std::vector<WorkerStats>& stats,
                         double WorkerStats::*busy) {
  double throughput = 0.0;
  for (const auto& s : stats) {
    if (s.entries == 0) continue;
    if (s.*busy <= 0.0) return 0.0;
    throughput += static_cast<double>(s.entries) / (s.*busy);
  }
  return throughput > 0.0 ? static_cast<double>(entries) / throughput : 0.0;
}

}  // namespace

std::string make_key(std::string_view row, std::string_view col) {
  std::string key;
  key.reserve(row.size() + 1 + col.size());
  key.append(row);
  key.push_back('\0');
  key.append(col);
  return key;
}

std::string encode_weight(double weight) {
  const auto bits = std::bit_cast<std::uint64_t>(weight);
  std::string out(8, '\0');
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  return out;
}

double decode_weight(std::string_view bytes) {
  if (bytes.size() != 8) throw StoreError("decode_weight: expected 8 bytes, got " + std::to_string(bytes.size()));
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

SparseAssoc::SparseAssoc(std::span<const Triple> triples) {
  records_.reserve(triples.size());
  for (const auto& t : triples) records_.push_back({make_key(t.row, t.col), encode_weight(t.weight)});
  // Stable so that, among equal keys, the last input sorts last and survives.
  std::stable_sort(records_.begin(), records_.end(),
                   [](const Record& a, const Record& b) { return a.key < b.key; });
  auto out = records_.begin();
  for (auto it = records_.begin(); it != records_.end(); ++it) {
    auto next = std::next(it);
    if (next != records_.end() && next->key == it->key) continue;
    if (out != it) *out = std::move(*it);
    ++out;
  }
  records_.erase(out, records_.end());
}

IngestMetrics measure_rates(count_t entries, const PhaseDurations& d) {
  IngestMetrics m;
  m.entries = entries;
  m.for_seconds = d.for_seconds;
  m.load_seconds = d.load_seconds;
  m.ingest_seconds = d.ingest_seconds;
  const auto rate = [entries](double seconds) -> std::optional<double> {
    if (entries == 0) return 0.0;
    if (seconds <= 0.0) return std::nullopt;
    return static_cast<double>(entries) / seconds;
  };
  m.for_rate = rate(d.for_seconds);
  m.load_rate = rate(d.load_seconds);
  m.ingest_rate = rate(d.ingest_seconds);
  return m;
}

IngestMetrics run_ingest(std::span<const BlockSpec> blocks, const Schema& schema, count_t workers,
                         count_t batch_size, Store& store) {
  if (workers == 0) throw SpecError("workers must be at least 1");
  if (batch_size == 0) throw SpecError("batch_size must be at least 1");

  std::vector<count_t> starts{0};  // prefix sums of block sizes
  for (const auto& spec : blocks) {
    validate_block(spec, schema);
    starts.push_back(starts.back() + block_nnz(spec));
  }
  const count_t total = starts.back();

  std::vector<WorkerStats> stats(workers);
  std::atomic<count_t> ingested{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto work = [&](count_t w) {
    WorkerStats& s = stats[w];
    const count_t lo = w * (total / workers) + std::min(w, total % workers);
    const count_t hi = (w + 1) * (total / workers) + std::min(w + 1, total % workers);
    try {
      for (std::size_t b = 0; b < blocks.size() && !abort; ++b) {
        const count_t first = std::max(lo, starts[b]);
        const count_t last = std::min(hi, starts[b + 1]);
        if (first >= last) continue;

        auto t = Clock::now();
        const std::vector<LocalEntry> entries = generate_block(blocks[b]);
        s.generate_busy += seconds_since(t);

        for (count_t pos = first; pos < last && !abort; pos += batch_size) {
          const count_t end = std::min(last, pos + batch_size);
          const std::span<const LocalEntry> batch(entries.data() + (pos - starts[b]), end - pos);

          t = Clock::now();
          const std::vector<Triple> triples = label_triples(batch, blocks[b], schema);
          s.for_busy += seconds_since(t);

          t = Clock::now();
          const SparseAssoc assoc(triples);
          s.load_busy += seconds_since(t);

          t = Clock::now();
          store.put_batch(assoc.records());
          s.ingest_busy += seconds_since(t);

          s.entries += batch.size();
          ingested += batch.size();
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      abort = true;
    }
  };

  const auto run_start = Clock::now();
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (count_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  const double wall = seconds_since(run_start);

  if (first_error) {
    std::string what = "unknown failure";
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw IngestError("ingest aborted after " + std::to_string(ingested.load()) + " of " +
                          std::to_string(total) + " entries: " + what,
                      ingested.load());
  }

  IngestMetrics m = measure_rates(
      total, {aggregate_seconds(total, stats, &WorkerStats::for_busy),
              aggregate_seconds(total, stats, &WorkerStats::load_busy),
              aggregate_seconds(total, stats, &WorkerStats::ingest_busy)});
  m.workers = workers;
  m.batch_size = batch_size;
  m.wall_seconds = wall;
  for (const auto& s : stats) m.generate_seconds += s.generate_busy;
  return m;
}

}  // namespace brainschema
