#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "arena/core/agent.hpp"
#include "arena/core/env.hpp"
#include "arena/harness/registry.hpp"

namespace arena {

inline constexpr const char* kToolkitVersion = "arena 0.1.0";

// One competitor in a match: a registered agent, optionally seen through an
// agent-side interface pipeline (innermost first). An entry covering several
// env slots is a team of identical members.
struct AgentEntry {
  std::string name;
  Json params = Json::object();
  Json interfaces = Json::array();
  // Env slots controlled by this entry; derived from the env when absent.
  std::optional<std::vector<std::size_t>> slots;

  static AgentEntry from_json(const Json& j);
  Json to_json() const;
};

struct MatchSpec {
  std::string env;
  Json env_params = Json::object();
  Json env_interfaces = Json::array();
  std::vector<AgentEntry> agents;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  std::string replay;  // path, empty for none
  // On odd episodes the entries move one position along the seating order.
  bool alternate_sides = true;
  std::size_t threads = 1;

  static MatchSpec from_json(const Json& j);
  Json to_json() const;
};

// An agent and the env slots it plays, in the order the agent sees them.
struct Seat {
  AgentPtr agent;
  std::vector<std::size_t> slots;
};

struct EpisodeOutcome {
  std::uint64_t seed = 0;
  // Winning raw slots as reported by the env; empty on a draw, nullopt if
  // the env reported no outcome (counted as a draw).
  std::optional<std::vector<std::size_t>> winner_slots;
  std::vector<double> returns;  // per env slot
  std::size_t length = 0;
};

// Runs one episode with freshly constructed seats (they are set up here).
// Every env slot must belong to exactly one seat. Invalid actions raise
// SpaceMismatch naming the seat and slot.
EpisodeOutcome run_episode(Env& env, std::vector<Seat>& seats, std::uint64_t seed);

enum class Result { Win, Draw, Loss };

// Outcome for the side owning `raw_slots`.
Result classify(const EpisodeOutcome& o, const std::vector<std::size_t>& raw_slots);

struct MatchResult {
  std::vector<EpisodeOutcome> episodes;
  std::vector<Result> results;  // from the first entry's point of view
  std::size_t wins = 0;
  std::size_t draws = 0;
  std::size_t losses = 0;

  // (wins + draws/2) / episodes; throws ConfigError for an empty match.
  double win_rate() const;
  double mean_length() const;
  std::vector<double> mean_returns() const;
};

// The environment of a match: the registered env under its env-side pipeline.
std::unique_ptr<Env> build_env(const MatchSpec& spec, const Registry& registry);

// Seats for one episode. `rotation` shifts entries along the seating order.
std::vector<Seat> build_seats(const MatchSpec& spec, const Env& env, const Registry& registry,
                              std::uint64_t episode_seed, std::size_t rotation);

// Raw env slots behind `slots` of a possibly wrapped env.
std::vector<std::size_t> raw_slots(const Env& env, const std::vector<std::size_t>& slots);

// Plays spec.episodes episodes; episode k uses seed spec.seed + k. Replay
// lines, if `replay` is given, are written in episode order.
MatchResult run_match(const MatchSpec& spec, const Registry& registry, std::ostream* replay = nullptr);

// {env, agents, episodes, wins, draws, losses, win_rate, mean_return_per_slot, mean_length}
Json match_stats(const MatchSpec& spec, const MatchResult& r);

}  // namespace arena
