#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "arena/core/value.hpp"

namespace arena {

// Terminal info mapping shared by the built-in environments:
//   "winner"        DiscreteV(index into teams), absent on a draw
//   "winner_slots"  VectorV of the winning raw slots, empty on a draw
Value terminal_info(const std::vector<std::vector<std::size_t>>& teams,
                    std::optional<std::size_t> winning_team);

// Slots listed under "winner_slots", or nullopt if `info` carries no outcome.
std::optional<std::vector<std::size_t>> winner_slots(const Value& info);

}  // namespace arena
