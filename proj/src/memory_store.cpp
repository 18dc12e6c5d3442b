#include "brainschema/store.hpp"

namespace brainschema {

std::vector<Record> Store::scan_range(std::string_view lo,
                                      std::optional<std::string_view> hi) const {
  std::vector<Record> out;
  scan_range(lo, hi, [&](std::string_view k, std::string_view v) {
    out.push_back({std::string(k), std::string(v)});
    return true;
  });
  return out;
}

void MemoryStore::put_batch(std::span<const Record> records) {
  std::unique_lock lock(mutex_);
  for (const auto& r : records) map_.insert_or_assign(r.key, r.value);
}

void MemoryStore::scan_range(std::string_view lo, std::optional<std::string_view> hi,
                             const ScanVisitor& visit) const {
  std::shared_lock lock(mutex_);
  auto it = map_.lower_bound(lo);
  auto end = hi ? map_.lower_bound(*hi) : map_.end();
  if (hi && *hi <= lo) return;
  for (; it != end; ++it) {
    if (!visit(it->first, it->second)) return;
  }
}

std::uint64_t MemoryStore::count() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

std::unique_ptr<Store> memory_store() { return std::make_unique<MemoryStore>(); }

}  // namespace brainschema
