#include "arena/core/bundle.hpp"

#include <algorithm>

namespace arena {

SlotPartition::SlotPartition(std::vector<std::vector<std::size_t>> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) throw InvalidPartition("partition has no groups");
  std::size_t next = 0;
  for (std::size_t k = 0; k < groups_.size(); ++k) {
    const auto& g = groups_[k];
    if (g.empty()) throw InvalidPartition("group " + std::to_string(k) + " is empty");
    for (auto slot : g) {
      if (slot != next) {
        throw InvalidPartition("group " + std::to_string(k) + " expected slot " +
                               std::to_string(next) + " but found " + std::to_string(slot) +
                               " (groups must be disjoint, contiguous and in order)");
      }
      ++next;
    }
  }
  slot_count_ = next;
}

SlotPartition SlotPartition::singletons(std::size_t n) {
  std::vector<std::vector<std::size_t>> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back({i});
  return SlotPartition(std::move(g));
}

SlotPartition SlotPartition::from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<std::size_t>> g;
  std::size_t next = 0;
  for (auto s : sizes) {
    std::vector<std::size_t> grp;
    for (std::size_t i = 0; i < s; ++i) grp.push_back(next++);
    g.push_back(std::move(grp));
  }
  return SlotPartition(std::move(g));
}

std::vector<std::size_t> SlotPartition::sizes() const {
  std::vector<std::size_t> s;
  for (const auto& g : groups_) s.push_back(g.size());
  return s;
}

std::size_t SlotPartition::group_of(std::size_t slot) const {
  for (std::size_t k = 0; k < groups_.size(); ++k) {
    if (slot >= groups_[k].front() && slot <= groups_[k].back()) return k;
  }
  throw InvalidPartition("slot " + std::to_string(slot) + " is not covered");
}

std::vector<Bundle> bundle_split(const Bundle& b, const SlotPartition& partition) {
  return partition.split(b);
}

Bundle bundle_merge(const std::vector<Bundle>& parts, const SlotPartition& partition) {
  return partition.merge(parts);
}

}  // namespace arena
