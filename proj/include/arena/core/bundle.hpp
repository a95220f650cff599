#pragma once

#include <cstddef>
#include <vector>

#include "arena/core/error.hpp"
#include "arena/core/value.hpp"

namespace arena {

// One Value per agent slot, in slot order.
using Bundle = std::vector<Value>;

struct StepResult {
  Bundle obs;
  std::vector<double> rewards;
  bool done = false;
  std::vector<bool> alive;
  Value info = Value::mapping({});
};

// Ordered, disjoint, contiguous groups of slot indices covering 0..N-1.
class SlotPartition {
 public:
  // Throws InvalidPartition unless the groups are non-empty, disjoint,
  // contiguous and cover 0..N-1 in order.
  explicit SlotPartition(std::vector<std::vector<std::size_t>> groups);

  static SlotPartition singletons(std::size_t n);
  static SlotPartition from_sizes(const std::vector<std::size_t>& sizes);

  std::size_t group_count() const { return groups_.size(); }
  std::size_t slot_count() const { return slot_count_; }
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  const std::vector<std::size_t>& group(std::size_t k) const { return groups_.at(k); }
  std::vector<std::size_t> sizes() const;
  // Group containing `slot`.
  std::size_t group_of(std::size_t slot) const;

  template <class T>
  std::vector<std::vector<T>> split(const std::vector<T>& xs) const {
    if (xs.size() != slot_count_) {
      throw InvalidPartition("partition covers " + std::to_string(slot_count_) +
                             " slots but the bundle has " + std::to_string(xs.size()));
    }
    std::vector<std::vector<T>> out;
    out.reserve(groups_.size());
    for (const auto& g : groups_) {
      std::vector<T> part;
      part.reserve(g.size());
      for (auto i : g) part.push_back(xs[i]);
      out.push_back(std::move(part));
    }
    return out;
  }

  template <class T>
  std::vector<T> merge(const std::vector<std::vector<T>>& parts) const {
    if (parts.size() != groups_.size()) {
      throw InvalidPartition("merge expects " + std::to_string(groups_.size()) + " groups");
    }
    std::vector<T> out;
    out.reserve(slot_count_);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].size() != groups_[k].size()) {
        throw InvalidPartition("group " + std::to_string(k) + " has the wrong slot count");
      }
      out.insert(out.end(), parts[k].begin(), parts[k].end());
    }
    return out;
  }

  friend bool operator==(const SlotPartition&, const SlotPartition&) = default;

 private:
  std::vector<std::vector<std::size_t>> groups_;
  std::size_t slot_count_ = 0;
};

std::vector<Bundle> bundle_split(const Bundle& b, const SlotPartition& partition);
Bundle bundle_merge(const std::vector<Bundle>& parts, const SlotPartition& partition);

}  // namespace arena
