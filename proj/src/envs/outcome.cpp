#include "arena/envs/outcome.hpp"

namespace arena {

Value terminal_info(const std::vector<std::vector<std::size_t>>& teams,
                    std::optional<std::size_t> winning_team) {
  std::vector<double> slots;
  std::vector<Value::Field> f;
  if (winning_team) {
    for (auto s : teams.at(*winning_team)) slots.push_back(static_cast<double>(s));
    f.emplace_back("winner", Value::discrete(static_cast<std::int64_t>(*winning_team)));
  }
  f.emplace_back("winner_slots", Value::vector(std::move(slots)));
  return Value::mapping(std::move(f));
}

std::optional<std::vector<std::size_t>> winner_slots(const Value& info) {
  if (!info.is_mapping()) return std::nullopt;
  const Value* w = info.find("winner_slots");
  if (!w || !w->is_vector()) return std::nullopt;
  std::vector<std::size_t> out;
  for (double x : w->entries()) out.push_back(static_cast<std::size_t>(x));
  return out;
}

}  // namespace arena
