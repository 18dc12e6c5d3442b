#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace brainschema {

/// A chain of nested partitions over [0, units.back()).
///
/// Level k has `units[k]` units, numbered globally in hierarchy-major order.
/// Unit i of level k owns the contiguous run of level-(k+1) units
/// [child_begin(k, i), child_begin(k, i + 1)). When units[k+1] is not a
/// multiple of units[k] the first `units[k+1] % units[k]` units receive one
/// extra child, so sibling sizes differ by at most one.
class Hierarchy {
 public:
  Hierarchy() = default;
  /// `units` must be non-decreasing and start with a positive count.
  explicit Hierarchy(std::vector<std::uint64_t> units);

  std::size_t levels() const { return units_.size(); }
  std::uint64_t units(std::size_t level) const { return units_[level]; }
  std::uint64_t leaves() const { return units_.back(); }

  /// First child (at level + 1) of unit `i` at `level`. Defined for i == units(level).
  std::uint64_t child_begin(std::size_t level, std::uint64_t i) const;
  std::uint64_t child_count(std::size_t level, std::uint64_t i) const {
    return child_begin(level, i + 1) - child_begin(level, i);
  }
  /// The unit at `level` that owns unit `child` of level + 1.
  std::uint64_t owner(std::size_t level, std::uint64_t child) const;

  /// First leaf covered by unit `i` of `level`.
  std::uint64_t leaf_begin(std::size_t level, std::uint64_t i) const;

 private:
  std::vector<std::uint64_t> units_;
};

}  // namespace brainschema
