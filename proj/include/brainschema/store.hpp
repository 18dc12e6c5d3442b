#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brainschema {

struct Record {
  std::string key;
  std::string value;

  bool operator==(const Record&) const = default;
};

/// Return false to stop a scan early.
using ScanVisitor = std::function<bool(std::string_view key, std::string_view value)>;

/// Sorted key-value sink standing in for a tablet-server database.
///
/// Keys order lexicographically by unsigned bytes. put_batch is atomic per
/// batch and may be called concurrently from several threads; a later write
/// of an existing key replaces its value.
class Store {
 public:
  virtual ~Store() = default;

  virtual void put_batch(std::span<const Record> records) = 0;

  /// Visits keys in [lo, hi) in order; no `hi` means unbounded.
  virtual void scan_range(std::string_view lo, std::optional<std::string_view> hi,
                          const ScanVisitor& visit) const = 0;

  /// Number of distinct stored keys.
  virtual std::uint64_t count() const = 0;

  std::vector<Record> scan_range(std::string_view lo = {},
                                 std::optional<std::string_view> hi = std::nullopt) const;
};

class MemoryStore final : public Store {
 public:
  void put_batch(std::span<const Record> records) override;
  void scan_range(std::string_view lo, std::optional<std::string_view> hi,
                  const ScanVisitor& visit) const override;
  std::uint64_t count() const override;
  using Store::scan_range;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::string, std::less<>> map_;
};

struct DurableOptions {
  /// fdatasync the log after every batch.
  bool sync = true;
  /// Records buffered in memory before they are written out as a sorted run.
  std::size_t memtable_limit = 262'144;
};

/// Log-structured store in a directory:
///
///   wal.log       batches appended as [magic u32][count u32][bytes u32][crc32 u32][payload]
///   run_NNNNNN.dat sorted runs: "BSRUN001", u64 record count, then records
///   MANIFEST      text list of live runs, replaced atomically by rename
///
/// All integers little-endian; a record is [key u32][value u32][key][value].
/// Reopening replays the log; a torn or corrupt tail batch is discarded.
class DurableStore final : public Store {
 public:
  explicit DurableStore(std::filesystem::path dir, DurableOptions options = {});
  ~DurableStore() override;

  DurableStore(const DurableStore&) = delete;
  DurableStore& operator=(const DurableStore&) = delete;

  void put_batch(std::span<const Record> records) override;
  void scan_range(std::string_view lo, std::optional<std::string_view> hi,
                  const ScanVisitor& visit) const override;
  std::uint64_t count() const override;
  using Store::scan_range;

  /// Writes the in-memory table out as a new sorted run and empties the log.
  void flush();
  /// Merges every run (and the in-memory table) into a single run.
  void compact();

  std::size_t run_count() const;
  const std::filesystem::path& directory() const { return dir_; }
  /// Bytes dropped from the log tail on open.
  std::uint64_t discarded_log_bytes() const { return discarded_log_bytes_; }

 private:
  struct Run;

  void open_log();
  void replay_log();
  void write_manifest() const;
  void flush_locked();
  /// `produce` pushes records in key order into the sink it is given.
  std::unique_ptr<Run> write_run(const std::function<void(const ScanVisitor&)>& produce,
                                 std::uint64_t id);

  std::filesystem::path dir_;
  DurableOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::string, std::less<>> memtable_;
  std::vector<std::unique_ptr<Run>> runs_;  // oldest first
  std::uint64_t next_run_id_ = 1;
  int log_fd_ = -1;
  std::uint64_t discarded_log_bytes_ = 0;
  mutable std::optional<std::uint64_t> cached_count_;
};

std::unique_ptr<Store> memory_store();
std::unique_ptr<Store> durable_store(const std::filesystem::path& dir, DurableOptions options = {});

}  // namespace brainschema
