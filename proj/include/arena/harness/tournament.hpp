#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arena/harness/match.hpp"
#include "arena/harness/registry.hpp"

namespace arena {

struct PairRecord {
  std::size_t wins = 0;
  std::size_t draws = 0;
  std::size_t losses = 0;

  std::size_t played() const { return wins + draws + losses; }
};

// Head-to-head results between named entrants. record(i, j) is from i's
// point of view and always mirrors record(j, i).
class Scoreboard {
 public:
  explicit Scoreboard(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  void add(std::size_t i, std::size_t j, Result r_for_i);
  const PairRecord& record(std::size_t i, std::size_t j) const;

  // A win is worth 1 point and a draw 0.5.
  double points(std::size_t i) const;
  // (wins + draws/2) / played for i against j; nullopt on the diagonal or
  // for pairs that never met.
  std::optional<double> win_rate(std::size_t i, std::size_t j) const;

  // {"entrants": [..], "points": [..], "records": [[{wins,draws,losses}|null]],
  //  "win_rate": [[x|null]]}
  Json to_json() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<PairRecord>> table_;
};

struct Entrant {
  std::string label;  // defaults to the agent name, made unique
  AgentEntry agent;
};

struct TournamentSpec {
  std::string env;
  Json env_params = Json::object();
  Json env_interfaces = Json::array();
  std::vector<Entrant> entrants;
  std::size_t episodes_per_pair = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  // {"env", "env_interfaces"?, "entrants": [agent entry + optional "label"],
  //  "episodes_per_pair", "seed", "threads"?}
  static TournamentSpec from_json(const Json& j);
};

// Every unordered pair {i, j} (i < j) plays one match of episodes_per_pair
// episodes with sides alternating per episode. Pair p, in lexicographic order,
// uses base seed seed + p * episodes_per_pair.
Scoreboard round_robin(const TournamentSpec& spec, const Registry& registry);

}  // namespace arena
