#include "arena/harness/tournament.hpp"

#include <map>

#include "arena/core/error.hpp"

namespace arena {

Scoreboard::Scoreboard(std::vector<std::string> names)
    : names_(std::move(names)), table_(names_.size(), std::vector<PairRecord>(names_.size())) {}

void Scoreboard::add(std::size_t i, std::size_t j, Result r) {
  if (i >= size() || j >= size() || i == j) throw ConfigError("scoreboard: bad pair");
  auto& mine = table_[i][j];
  auto& theirs = table_[j][i];
  switch (r) {
    case Result::Win: ++mine.wins; ++theirs.losses; break;
    case Result::Draw: ++mine.draws; ++theirs.draws; break;
    case Result::Loss: ++mine.losses; ++theirs.wins; break;
  }
}

const PairRecord& Scoreboard::record(std::size_t i, std::size_t j) const { return table_.at(i).at(j); }

double Scoreboard::points(std::size_t i) const {
  double p = 0.0;
  for (const auto& r : table_.at(i)) p += static_cast<double>(r.wins) + 0.5 * static_cast<double>(r.draws);
  return p;
}

std::optional<double> Scoreboard::win_rate(std::size_t i, std::size_t j) const {
  const auto& r = record(i, j);
  if (i == j || r.played() == 0) return std::nullopt;
  return (static_cast<double>(r.wins) + 0.5 * static_cast<double>(r.draws)) / static_cast<double>(r.played());
}

Json Scoreboard::to_json() const {
  Json points_json = Json::array(), records = Json::array(), rates = Json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    points_json.push_back(points(i));
    Json rec_row = Json::array(), rate_row = Json::array();
    for (std::size_t j = 0; j < size(); ++j) {
      const auto& r = table_[i][j];
      rec_row.push_back(i == j ? Json() : Json{{"wins", r.wins}, {"draws", r.draws}, {"losses", r.losses}});
      const auto w = win_rate(i, j);
      rate_row.push_back(w ? Json(*w) : Json());
    }
    records.push_back(rec_row);
    rates.push_back(rate_row);
  }
  return {{"entrants", names_}, {"points", points_json}, {"records", records}, {"win_rate", rates}};
}

TournamentSpec TournamentSpec::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("tournament config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "env" && key != "env_interfaces" && key != "entrants" && key != "episodes_per_pair" &&
        key != "seed" && key != "threads") {
      throw ConfigError("tournament config: unknown field '" + key + "'");
    }
  }
  // Reuse the match parser for env and interfaces.
  Json probe{{"agents", Json::array()}};
  if (j.contains("env")) probe["env"] = j.at("env");
  if (j.contains("env_interfaces")) probe["env_interfaces"] = j.at("env_interfaces");
  const MatchSpec m = MatchSpec::from_json(probe);

  TournamentSpec t;
  t.env = m.env;
  t.env_params = m.env_params;
  t.env_interfaces = m.env_interfaces;
  if (!j.contains("entrants") || !j.at("entrants").is_array()) throw ConfigError("tournament config: 'entrants' list is required");
  std::map<std::string, int> used;
  for (const auto& e : j.at("entrants")) {
    Json body = e;
    std::string label;
    if (body.is_object() && body.contains("label")) {
      if (!body.at("label").is_string()) throw ConfigError("tournament config: 'label' must be a string");
      label = body.at("label").get<std::string>();
      body.erase("label");
    }
    Entrant en{label, AgentEntry::from_json(body)};
    if (en.agent.slots) throw ConfigError("tournament config: entrants cannot fix their slots");
    if (en.label.empty()) en.label = en.agent.name;
    if (used[en.label]++ > 0) en.label += "#" + std::to_string(used[en.label]);
    t.entrants.push_back(std::move(en));
  }
  auto count = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_unsigned()) throw ConfigError(std::string("tournament config: '") + key + "' must be a non-negative integer");
    return j.at(key).get<std::uint64_t>();
  };
  t.episodes_per_pair = count("episodes_per_pair", 10);
  t.seed = count("seed", 0);
  t.threads = std::max<std::size_t>(1, count("threads", 1));
  return t;
}

Scoreboard round_robin(const TournamentSpec& spec, const Registry& registry) {
  const std::size_t n = spec.entrants.size();
  if (n < 2) throw ConfigError("round robin needs at least two entrants");
  std::vector<std::string> names;
  for (const auto& e : spec.entrants) names.push_back(e.label);
  Scoreboard board(names);
  std::size_t pair = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++pair) {
      MatchSpec m;
      m.env = spec.env;
      m.env_params = spec.env_params;
      m.env_interfaces = spec.env_interfaces;
      m.agents = {spec.entrants[i].agent, spec.entrants[j].agent};
      m.episodes = spec.episodes_per_pair;
      m.seed = spec.seed + pair * spec.episodes_per_pair;
      m.threads = spec.threads;
      m.alternate_sides = true;
      for (Result r : run_match(m, registry).results) board.add(i, j, r);
    }
  }
  return board;
}

}  // namespace arena
