#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <queue>
#include <sstream>

#include "brainschema/errors.hpp"
#include "brainschema/store.hpp"

namespace fs = std::filesystem;

namespace brainschema {
namespace {

constexpr std::uint32_t kBatchMagic = 0x31424C57;  // "WLB1"
constexpr char kRunMagic[8] = {'B', 'S', 'R', 'U', 'N', '0', '0', '1'};
constexpr std::size_t kIndexStride = 256;
constexpr std::size_t kBatchHeader = 16;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void put_record(std::string& out, std::string_view key, std::string_view value) {
  put_u32(out, static_cast<std::uint32_t>(key.size()));
  put_u32(out, static_cast<std::uint32_t>(value.size()));
  out.append(key);
  out.append(value);
}

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, const std::string& bytes, const char* what) {
  const char* p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError(std::string(what) + ": write failed: " + errno_text());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

void sync_file(const fs::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw StoreError("sync " + path.string() + ": " + errno_text());
  ::fsync(fd);
  ::close(fd);
}

std::string run_name(std::uint64_t id) {
  std::string digits = std::to_string(id);
  return "run_" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits + ".dat";
}

/// Cursor over one sorted source during a merge.
class Cursor {
 public:
  virtual ~Cursor() = default;
  virtual bool valid() const = 0;
  virtual std::string_view key() const = 0;
  virtual std::string_view value() const = 0;
  virtual void next() = 0;
};

template <typename Map>
class MapCursor final : public Cursor {
 public:
  MapCursor(const Map& map, std::string_view lo) : it_(map.lower_bound(lo)), end_(map.end()) {}
  bool valid() const override { return it_ != end_; }
  std::string_view key() const override { return it_->first; }
  std::string_view value() const override { return it_->second; }
  void next() override { ++it_; }

 private:
  typename Map::const_iterator it_;
  typename Map::const_iterator end_;
};

}  // namespace

struct DurableStore::Run {
  fs::path path;
  std::uint64_t id = 0;
  std::uint64_t records = 0;
  std::vector<std::pair<std::string, std::uint64_t>> index;  // every kIndexStride-th key

  std::uint64_t seek_offset(std::string_view lo) const {
    auto it = std::upper_bound(index.begin(), index.end(), lo,
                               [](std::string_view k, const auto& e) { return k < e.first; });
    if (it == index.begin()) return sizeof kRunMagic + 8;
    return std::prev(it)->second;
  }
};

namespace {

class RunCursor final : public Cursor {
 public:
  RunCursor(const fs::path& path, std::uint64_t offset, std::string_view lo) {
    in_.rdbuf()->pubsetbuf(buffer_.get(), kBufferSize);
    in_.open(path, std::ios::binary);
    if (!in_) throw StoreError("scan: cannot open " + path.string());
    in_.seekg(static_cast<std::streamoff>(offset));
    read();
    while (valid_ && std::string_view(key_) < lo) read();
  }
  bool valid() const override { return valid_; }
  std::string_view key() const override { return key_; }
  std::string_view value() const override { return value_; }
  void next() override { read(); }

 private:
  void read() {
    char header[8];
    if (!in_.read(header, sizeof header)) {
      valid_ = false;
      return;
    }
    key_.resize(get_le(header, 4));
    value_.resize(get_le(header + 4, 4));
    if (!in_.read(key_.data(), static_cast<std::streamsize>(key_.size())) ||
        !in_.read(value_.data(), static_cast<std::streamsize>(value_.size()))) {
      throw StoreError("scan: truncated run record");
    }
    valid_ = true;
  }

  static constexpr std::size_t kBufferSize = 1 << 16;
  std::unique_ptr<char[]> buffer_ = std::make_unique<char[]>(kBufferSize);
  std::ifstream in_;
  std::string key_;
  std::string value_;
  bool valid_ = false;
};

/// K-way merge; on equal keys the source with the lowest rank wins
/// (rank 0 is the newest data).
void merge_sources(std::vector<std::unique_ptr<Cursor>>& sources, std::optional<std::string_view> hi,
                   const ScanVisitor& visit) {
  auto later = [&](std::size_t a, std::size_t b) {
    const int c = sources[a]->key().compare(sources[b]->key());
    return c != 0 ? c > 0 : a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> heap(later);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i]->valid()) heap.push(i);
  }
  std::string last;
  bool have_last = false;
  while (!heap.empty()) {
    const std::size_t i = heap.top();
    heap.pop();
    Cursor& c = *sources[i];
    if (hi && c.key() >= *hi) continue;
    if (!have_last || c.key() != last) {
      last.assign(c.key());
      have_last = true;
      if (!visit(c.key(), c.value())) return;
    }
    c.next();
    if (c.valid()) heap.push(i);
  }
}

}  // namespace

DurableStore::DurableStore(fs::path dir, DurableOptions options)
    : dir_(std::move(dir)), options_(options) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw StoreError("open " + dir_.string() + ": " + ec.message());

  const fs::path manifest = dir_ / "MANIFEST";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    std::getline(in, line);
    if (line != "brainschema-store 1") throw StoreError("open: unrecognized MANIFEST header");
    while (std::getline(in, line)) {
      std::istringstream fields(line);
      std::string tag;
      fields >> tag;
      if (tag == "next") {
        fields >> next_run_id_;
      } else if (tag == "run") {
        auto run = std::make_unique<Run>();
        std::string name;
        fields >> run->id >> name;
        run->path = dir_ / name;
        std::ifstream rf(run->path, std::ios::binary);
        char header[16];
        if (!rf.read(header, sizeof header) || std::memcmp(header, kRunMagic, 8) != 0) {
          throw StoreError("open: bad run file " + run->path.string());
        }
        run->records = get_le(header + 8, 8);
        std::uint64_t offset = sizeof header;
        std::string key;
        for (std::uint64_t i = 0; i < run->records; ++i) {
          char rh[8];
          if (!rf.read(rh, sizeof rh)) throw StoreError("open: truncated run " + run->path.string());
          const auto klen = get_le(rh, 4);
          const auto vlen = get_le(rh + 4, 4);
          key.resize(klen);
          rf.read(key.data(), static_cast<std::streamsize>(klen));
          rf.seekg(static_cast<std::streamoff>(vlen), std::ios::cur);
          if (!rf) throw StoreError("open: truncated run " + run->path.string());
          if (i % kIndexStride == 0) run->index.emplace_back(key, offset);
          offset += 8 + klen + vlen;
        }
        runs_.push_back(std::move(run));
      } else if (!tag.empty()) {
        throw StoreError("open: unknown MANIFEST entry '" + tag + "'");
      }
    }
  }
  replay_log();
  open_log();
}

DurableStore::~DurableStore() {
  if (log_fd_ >= 0) ::close(log_fd_);
}

void DurableStore::open_log() {
  log_fd_ = ::open((dir_ / "wal.log").c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (log_fd_ < 0) throw StoreError("open log: " + errno_text());
}

void DurableStore::replay_log() {
  const fs::path log = dir_ / "wal.log";
  if (!fs::exists(log)) return;
  std::ifstream in(log, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  while (bytes.size() - pos >= kBatchHeader) {
    const char* h = bytes.data() + pos;
    const auto magic = get_le(h, 4);
    const auto records = get_le(h + 4, 4);
    const auto length = get_le(h + 8, 4);
    const auto crc = get_le(h + 12, 4);
    if (magic != kBatchMagic || bytes.size() - pos - kBatchHeader < length) break;
    const char* payload = h + kBatchHeader;
    if (::crc32(0L, reinterpret_cast<const Bytef*>(payload), static_cast<uInt>(length)) != crc) break;
    std::size_t p = 0;
    for (std::uint64_t i = 0; i < records; ++i) {
      const auto klen = get_le(payload + p, 4);
      const auto vlen = get_le(payload + p + 4, 4);
      p += 8;
      memtable_.insert_or_assign(std::string(payload + p, klen), std::string(payload + p + klen, vlen));
      p += klen + vlen;
    }
    pos += kBatchHeader + length;
  }
  if (pos < bytes.size()) {
    discarded_log_bytes_ = bytes.size() - pos;
    fs::resize_file(log, pos);
  }
}

void DurableStore::put_batch(std::span<const Record> records) {
  if (records.empty()) return;
  std::string payload;
  std::size_t bytes = 0;
  for (const auto& r : records) bytes += 8 + r.key.size() + r.value.size();
  payload.reserve(kBatchHeader + bytes);
  payload.resize(kBatchHeader);
  for (const auto& r : records) put_record(payload, r.key, r.value);
  const auto length = static_cast<std::uint32_t>(payload.size() - kBatchHeader);
  const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(payload.data() + kBatchHeader), length);
  std::string header;
  put_u32(header, kBatchMagic);
  put_u32(header, static_cast<std::uint32_t>(records.size()));
  put_u32(header, length);
  put_u32(header, static_cast<std::uint32_t>(crc));
  payload.replace(0, kBatchHeader, header);

  std::unique_lock lock(mutex_);
  write_all(log_fd_, payload, "put_batch");
  if (options_.sync && ::fdatasync(log_fd_) != 0) {
    throw StoreError("put_batch: fdatasync failed: " + errno_text());
  }
  for (const auto& r : records) memtable_.insert_or_assign(r.key, r.value);
  cached_count_.reset();
  if (memtable_.size() >= options_.memtable_limit) flush_locked();
}

std::unique_ptr<DurableStore::Run> DurableStore::write_run(
    const std::function<void(const ScanVisitor&)>& produce, std::uint64_t id) {
  auto run = std::make_unique<Run>();
  run->id = id;
  run->path = dir_ / run_name(id);
  const fs::path tmp = run->path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("flush: cannot create " + tmp.string());
    std::string chunk(kRunMagic, sizeof kRunMagic);
    put_u64(chunk, 0);  // record count, patched below
    std::uint64_t offset = chunk.size();
    produce([&](std::string_view key, std::string_view value) {
      if (run->records % kIndexStride == 0) run->index.emplace_back(std::string(key), offset);
      const std::size_t before = chunk.size();
      put_record(chunk, key, value);
      offset += chunk.size() - before;
      ++run->records;
      if (chunk.size() >= (1u << 20)) {
        out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        chunk.clear();
      }
      return true;
    });
    out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    std::string count;
    put_u64(count, run->records);
    out.seekp(sizeof kRunMagic);
    out.write(count.data(), 8);
    if (!out.flush()) throw StoreError("flush: write to " + tmp.string() + " failed");
  }
  if (options_.sync) sync_file(tmp);
  fs::rename(tmp, run->path);
  return run;
}

void DurableStore::write_manifest() const {
  const fs::path tmp = dir_ / "MANIFEST.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << "brainschema-store 1\n";
    out << "next " << next_run_id_ << '\n';
    for (const auto& run : runs_) out << "run " << run->id << ' ' << run->path.filename().string() << '\n';
    if (!out.flush()) throw StoreError("manifest: write failed");
  }
  if (options_.sync) sync_file(tmp);
  fs::rename(tmp, dir_ / "MANIFEST");
}

void DurableStore::flush_locked() {
  if (memtable_.empty()) return;
  auto run = write_run(
      [&](const ScanVisitor& sink) {
        for (const auto& [k, v] : memtable_) sink(k, v);
      },
      next_run_id_++);
  runs_.push_back(std::move(run));
  write_manifest();
  memtable_.clear();
  if (::ftruncate(log_fd_, 0) != 0) throw StoreError("flush: truncating log failed: " + errno_text());
  if (options_.sync) ::fdatasync(log_fd_);
}

void DurableStore::flush() {
  std::unique_lock lock(mutex_);
  flush_locked();
}

void DurableStore::compact() {
  std::unique_lock lock(mutex_);
  if (runs_.size() <= 1 && memtable_.empty()) return;

  std::vector<std::unique_ptr<Cursor>> sources;
  sources.push_back(std::make_unique<MapCursor<decltype(memtable_)>>(memtable_, ""));
  for (auto it = runs_.rbegin(); it != runs_.rend(); ++it) {
    sources.push_back(std::make_unique<RunCursor>((*it)->path, (*it)->seek_offset(""), ""));
  }
  auto run = write_run([&](const ScanVisitor& sink) { merge_sources(sources, std::nullopt, sink); },
                       next_run_id_++);

  std::vector<fs::path> obsolete;
  for (const auto& old : runs_) obsolete.push_back(old->path);
  runs_.clear();
  runs_.push_back(std::move(run));
  write_manifest();
  memtable_.clear();
  if (::ftruncate(log_fd_, 0) != 0) throw StoreError("compact: truncating log failed: " + errno_text());
  for (const auto& p : obsolete) fs::remove(p);
  cached_count_ = runs_.back()->records;
}

void DurableStore::scan_range(std::string_view lo, std::optional<std::string_view> hi,
                              const ScanVisitor& visit) const {
  if (hi && *hi <= lo) return;
  std::shared_lock lock(mutex_);
  std::vector<std::unique_ptr<Cursor>> sources;
  sources.push_back(std::make_unique<MapCursor<decltype(memtable_)>>(memtable_, lo));
  for (auto it = runs_.rbegin(); it != runs_.rend(); ++it) {
    sources.push_back(std::make_unique<RunCursor>((*it)->path, (*it)->seek_offset(lo), lo));
  }
  merge_sources(sources, hi, visit);
}

std::uint64_t DurableStore::count() const {
  {
    std::shared_lock lock(mutex_);
    if (runs_.empty()) return memtable_.size();
  }
  std::unique_lock lock(mutex_);
  if (cached_count_) return *cached_count_;
  std::vector<std::unique_ptr<Cursor>> sources;
  sources.push_back(std::make_unique<MapCursor<decltype(memtable_)>>(memtable_, ""));
  for (auto it = runs_.rbegin(); it != runs_.rend(); ++it) {
    sources.push_back(std::make_unique<RunCursor>((*it)->path, (*it)->seek_offset(""), ""));
  }
  std::uint64_t n = 0;
  merge_sources(sources, std::nullopt, [&](std::string_view, std::string_view) {
    ++n;
    return true;
  });
  cached_count_ = n;
  return n;
}

std::size_t DurableStore::run_count() const {
  std::shared_lock lock(mutex_);
  return runs_.size();
}

std::unique_ptr<Store> durable_store(const fs::path& dir, DurableOptions options) {
  return std::make_unique<DurableStore>(dir, options);
}

}  // namespace brainschema
