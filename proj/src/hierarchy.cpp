#include "brainschema/hierarchy.hpp"

#include <cassert>
#include <stdexcept>

namespace brainschema {

Hierarchy::Hierarchy(std::vector<std::uint64_t> units) : units_(std::move(units)) {
  if (units_.empty() || units_.front() == 0) {
    throw std::invalid_argument("hierarchy needs a positive top-level unit count");
  }
  for (std::size_t k = 1; k < units_.size(); ++k) {
    if (units_[k] < units_[k - 1]) {
      throw std::invalid_argument("hierarchy level " + std::to_string(k) +
                                  " has fewer units than its parent level");
    }
  }
}

std::uint64_t Hierarchy::child_begin(std::size_t level, std::uint64_t i) const {
  assert(level + 1 < units_.size() && i <= units_[level]);
  const std::uint64_t parents = units_[level];
  const std::uint64_t q = units_[level + 1] / parents;
  const std::uint64_t r = units_[level + 1] % parents;
  return i * q + (i < r ? i : r);
}

std::uint64_t Hierarchy::owner(std::size_t level, std::uint64_t child) const {
  assert(level + 1 < units_.size() && child < units_[level + 1]);
  const std::uint64_t parents = units_[level];
  const std::uint64_t q = units_[level + 1] / parents;
  const std::uint64_t r = units_[level + 1] % parents;
  const std::uint64_t big = r * (q + 1);
  if (child < big) return child / (q + 1);
  return r + (child - big) / q;
}

std::uint64_t Hierarchy::leaf_begin(std::size_t level, std::uint64_t i) const {
  for (std::size_t k = level; k + 1 < units_.size(); ++k) i = child_begin(k, i);
  return i;
}

}  // namespace brainschema
