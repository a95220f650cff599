#include "arena/harness/match.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "arena/core/error.hpp"
#include "arena/core/rng.hpp"
#include "arena/envs/outcome.hpp"
#include "arena/harness/replay.hpp"
#include "arena/interface/wrappers.hpp"

namespace arena {

namespace {

std::vector<std::size_t> slot_list(const Json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": 'slots' must be a list");
  std::vector<std::size_t> out;
  for (const auto& s : j) {
    if (!s.is_number_unsigned()) throw ConfigError(context + ": slot indices must be non-negative integers");
    out.push_back(s.get<std::size_t>());
  }
  return out;
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& context) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError(context + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

AgentEntry AgentEntry::from_json(const Json& j) {
  AgentEntry e;
  if (j.is_string()) {
    e.name = j.get<std::string>();
    return e;
  }
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string()) {
    throw ConfigError("agent entry must be a name or an object with \"name\"");
  }
  only_keys(j, {"name", "params", "interfaces", "slots"}, "agent entry");
  e.name = j.at("name").get<std::string>();
  if (j.contains("params")) e.params = j.at("params");
  if (j.contains("interfaces")) e.interfaces = j.at("interfaces");
  if (j.contains("slots")) e.slots = slot_list(j.at("slots"), "agent entry " + e.name);
  return e;
}

Json AgentEntry::to_json() const {
  Json j{{"name", name}, {"params", params}, {"interfaces", interfaces}};
  if (slots) j["slots"] = *slots;
  return j;
}

MatchSpec MatchSpec::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("match spec must be a JSON object");
  only_keys(j, {"env", "env_interfaces", "agents", "episodes", "seed", "replay", "alternate_sides", "threads"},
            "match spec");
  MatchSpec m;
  const Json& env = j.contains("env") ? j.at("env") : Json();
  if (env.is_string()) {
    m.env = env.get<std::string>();
  } else if (env.is_object() && env.contains("name") && env.at("name").is_string()) {
    only_keys(env, {"name", "params"}, "match spec env");
    m.env = env.at("name").get<std::string>();
    if (env.contains("params")) m.env_params = env.at("params");
  } else {
    throw ConfigError("match spec: 'env' must be a name or {\"name\", \"params\"}");
  }
  if (j.contains("env_interfaces")) m.env_interfaces = j.at("env_interfaces");
  if (!j.contains("agents") || !j.at("agents").is_array()) throw ConfigError("match spec: 'agents' list is required");
  for (const auto& a : j.at("agents")) m.agents.push_back(AgentEntry::from_json(a));
  auto count = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_unsigned()) throw ConfigError(std::string("match spec: '") + key + "' must be a non-negative integer");
    return j.at(key).get<std::uint64_t>();
  };
  m.episodes = count("episodes", 1);
  m.seed = count("seed", 0);
  m.threads = std::max<std::size_t>(1, count("threads", 1));
  if (j.contains("replay")) {
    if (!j.at("replay").is_string()) throw ConfigError("match spec: 'replay' must be a path");
    m.replay = j.at("replay").get<std::string>();
  }
  if (j.contains("alternate_sides")) {
    if (!j.at("alternate_sides").is_boolean()) throw ConfigError("match spec: 'alternate_sides' must be a boolean");
    m.alternate_sides = j.at("alternate_sides").get<bool>();
  }
  return m;
}

Json MatchSpec::to_json() const {
  Json agents_json = Json::array();
  for (const auto& a : agents) agents_json.push_back(a.to_json());
  // The replay path and thread count do not affect results and are left out
  // so that replays do not depend on them.
  return {{"env", {{"name", env}, {"params", env_params}}},
          {"env_interfaces", env_interfaces},
          {"agents", agents_json},
          {"episodes", episodes},
          {"seed", seed},
          {"alternate_sides", alternate_sides}};
}

namespace {

Bundle gather(const Bundle& b, const std::vector<std::size_t>& slots) {
  Bundle out;
  for (auto s : slots) out.push_back(b[s]);
  return out;
}

std::vector<double> gather(const std::vector<double>& xs, const std::vector<std::size_t>& slots) {
  std::vector<double> out;
  for (auto s : slots) out.push_back(xs[s]);
  return out;
}

std::vector<SpaceSpec> gather(const std::vector<SpaceSpec>& xs, const std::vector<std::size_t>& slots) {
  std::vector<SpaceSpec> out;
  for (auto s : slots) out.push_back(xs[s]);
  return out;
}

}  // namespace

EpisodeOutcome run_episode(Env& env, std::vector<Seat>& seats, std::uint64_t seed) {
  const std::size_t n = env.slot_count();
  std::vector<int> owner(n, -1);
  for (std::size_t k = 0; k < seats.size(); ++k) {
    if (!seats[k].agent) throw SetupError("seat " + std::to_string(k) + " has no agent");
    if (seats[k].agent->slot_count() != seats[k].slots.size()) {
      throw SetupError("agent " + seats[k].agent->name() + " controls " +
                       std::to_string(seats[k].agent->slot_count()) + " slots but was given " +
                       std::to_string(seats[k].slots.size()));
    }
    for (auto s : seats[k].slots) {
      if (s >= n || owner[s] >= 0) throw SetupError("slot " + std::to_string(s) + " is out of range or taken twice");
      owner[s] = static_cast<int>(k);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw SetupError("agents cover fewer slots than the environment's " + std::to_string(n));
  }
  for (auto& seat : seats) {
    seat.agent->setup(gather(env.observation_specs(), seat.slots), gather(env.action_specs(), seat.slots));
  }

  EpisodeOutcome out;
  out.seed = seed;
  out.returns.assign(n, 0.0);
  Bundle obs = env.reset(seed);
  for (auto& seat : seats) seat.agent->reset(gather(obs, seat.slots));
  std::vector<double> rewards(n, 0.0);
  for (;;) {
    Bundle actions(n);
    for (std::size_t k = 0; k < seats.size(); ++k) {
      auto& seat = seats[k];
      Bundle a;
      try {
        a = seat.agent->step(gather(obs, seat.slots), gather(rewards, seat.slots), false);
      } catch (const SpaceMismatch& e) {
        const auto slot = e.slot() && *e.slot() < seat.slots.size() ? std::optional(seat.slots[*e.slot()]) : std::nullopt;
        throw SpaceMismatch("agent " + seat.agent->name() + ": " + e.what(), slot);
      }
      if (a.size() != seat.slots.size()) {
        throw SpaceMismatch("agent " + seat.agent->name() + " returned " + std::to_string(a.size()) +
                                " actions for " + std::to_string(seat.slots.size()) + " slots",
                            seat.slots.front());
      }
      for (std::size_t i = 0; i < a.size(); ++i) actions[seat.slots[i]] = std::move(a[i]);
    }
    StepResult r;
    try {
      r = env.step(actions);
    } catch (const SpaceMismatch& e) {
      if (!e.slot() || *e.slot() >= n) throw;
      const auto& seat = seats[static_cast<std::size_t>(owner[*e.slot()])];
      throw SpaceMismatch("agent " + seat.agent->name() + " sent an invalid action: " + e.what(), e.slot());
    }
    ++out.length;
    for (std::size_t i = 0; i < n; ++i) out.returns[i] += r.rewards[i];
    obs = std::move(r.obs);
    rewards = std::move(r.rewards);
    if (r.done) {
      for (auto& seat : seats) seat.agent->step(gather(obs, seat.slots), gather(rewards, seat.slots), true);
      out.winner_slots = winner_slots(r.info);
      return out;
    }
  }
}

Result classify(const EpisodeOutcome& o, const std::vector<std::size_t>& raw) {
  if (!o.winner_slots || o.winner_slots->empty()) return Result::Draw;
  const auto& w = *o.winner_slots;
  const bool mine = std::any_of(raw.begin(), raw.end(), [&](std::size_t s) {
    return std::find(w.begin(), w.end(), s) != w.end();
  });
  return mine ? Result::Win : Result::Loss;
}

double MatchResult::win_rate() const {
  if (episodes.empty()) throw ConfigError("win-rate is undefined for a match with no episodes");
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(draws)) / static_cast<double>(episodes.size());
}

double MatchResult::mean_length() const {
  if (episodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : episodes) s += static_cast<double>(e.length);
  return s / static_cast<double>(episodes.size());
}

std::vector<double> MatchResult::mean_returns() const {
  if (episodes.empty()) return {};
  std::vector<double> m(episodes.front().returns.size(), 0.0);
  for (const auto& e : episodes) {
    for (std::size_t i = 0; i < m.size() && i < e.returns.size(); ++i) m[i] += e.returns[i];
  }
  for (auto& x : m) x /= static_cast<double>(episodes.size());
  return m;
}

std::unique_ptr<Env> build_env(const MatchSpec& spec, const Registry& registry) {
  auto env = registry.make_env(spec.env, spec.env_params);
  const bool plain = spec.env_interfaces.is_null() || (spec.env_interfaces.is_array() && spec.env_interfaces.empty());
  if (plain) return env;
  return wrap_env(std::move(env), registry.make_pipeline(spec.env_interfaces));
}

std::vector<std::size_t> raw_slots(const Env& env, const std::vector<std::size_t>& slots) {
  const auto* wrapped = dynamic_cast<const WrappedEnv*>(&env);
  if (!wrapped) return slots;
  std::vector<std::size_t> mid;
  for (auto s : slots) {
    for (auto i : wrapped->interface().inner_slots(s)) mid.push_back(i);
  }
  std::sort(mid.begin(), mid.end());
  mid.erase(std::unique(mid.begin(), mid.end()), mid.end());
  return raw_slots(wrapped->base(), mid);
}

namespace {

// Slot lists per seating position.
std::vector<std::vector<std::size_t>> seating(const MatchSpec& spec, const Env& env) {
  const std::size_t entries = spec.agents.size();
  const std::size_t n = env.slot_count();
  if (entries == 0) throw ConfigError("match spec: no agents");
  const bool explicit_slots = std::any_of(spec.agents.begin(), spec.agents.end(), [](const AgentEntry& a) { return a.slots.has_value(); });
  std::vector<std::vector<std::size_t>> seats;
  if (explicit_slots) {
    for (const auto& a : spec.agents) {
      if (!a.slots) throw ConfigError("match spec: either every agent entry lists its slots or none does");
      seats.push_back(*a.slots);
    }
    return seats;
  }
  const auto teams = env.teams();
  if (entries == teams.size()) return teams;
  if (entries == n) {
    for (std::size_t i = 0; i < n; ++i) seats.push_back({i});
    return seats;
  }
  if (n % entries != 0) {
    throw ConfigError("match spec: " + std::to_string(entries) + " agent entries cannot share " + std::to_string(n) +
                      " slots evenly; list the slots explicitly");
  }
  const std::size_t per = n / entries;
  for (std::size_t k = 0; k < entries; ++k) {
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < per; ++i) g.push_back(k * per + i);
    seats.push_back(g);
  }
  return seats;
}

std::uint64_t agent_seed(std::uint64_t episode_seed, std::size_t slot) {
  return RngStream(episode_seed, {"agent"}).child("slot", slot).next_u64();
}

}  // namespace

std::vector<Seat> build_seats(const MatchSpec& spec, const Env& env, const Registry& registry,
                              std::uint64_t episode_seed, std::size_t rotation) {
  const auto positions = seating(spec, env);
  const std::size_t m = spec.agents.size();
  std::vector<Seat> seats;
  for (std::size_t k = 0; k < m; ++k) {
    const AgentEntry& e = spec.agents[k];
    std::vector<std::size_t> slots = positions[(k + rotation) % m];
    const bool plain = e.interfaces.is_null() || (e.interfaces.is_array() && e.interfaces.empty());
    // Member j of an entry whose first slot is s draws from the stream of
    // slot s + j, so env-side and agent-side wrapping seed members alike.
    auto member = [&](std::size_t j) { return registry.make_agent(e.name, e.params, agent_seed(episode_seed, slots.front() + j)); };
    if (plain && slots.size() == 1) {
      seats.push_back({member(0), slots});
      continue;
    }
    std::size_t members = slots.size();
    if (!plain) {
      InterfacePtr scratch = registry.make_pipeline(e.interfaces);
      members = scratch->setup(Specs{gather(env.observation_specs(), slots), gather(env.action_specs(), slots)}).slot_count();
    }
    std::vector<AgentPtr> team;
    for (std::size_t j = 0; j < members; ++j) team.push_back(member(j));
    seats.push_back({wrap_agent(std::move(team), plain ? identity() : registry.make_pipeline(e.interfaces)), slots});
  }
  return seats;
}

namespace {

struct Played {
  EpisodeOutcome outcome;
  Result result = Result::Draw;
  std::string replay;
};

Played play(const MatchSpec& spec, const Registry& registry, std::size_t k) {
  const std::uint64_t seed = spec.seed + k;
  auto env = build_env(spec, registry);
  ReplayRecorder rec(spec.to_json(), k);
  env->set_observer(&rec);
  const std::size_t rotation = spec.alternate_sides && k % 2 == 1 ? 1 : 0;
  auto seats = build_seats(spec, *env, registry, seed, rotation);
  Played p;
  p.outcome = run_episode(*env, seats, seed);
  p.result = classify(p.outcome, raw_slots(*env, seats.front().slots));
  p.replay = rec.text();
  return p;
}

}  // namespace

MatchResult run_match(const MatchSpec& spec, const Registry& registry, std::ostream* replay) {
  std::vector<Played> played(spec.episodes);
  const std::size_t workers = std::min(spec.threads, spec.episodes);
  if (workers <= 1) {
    for (std::size_t k = 0; k < spec.episodes; ++k) played[k] = play(spec, registry, k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < spec.episodes;) {
          try {
            played[k] = play(spec, registry, k);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            next = spec.episodes;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  MatchResult r;
  for (auto& p : played) {
    if (replay) *replay << p.replay;
    r.episodes.push_back(std::move(p.outcome));
    r.results.push_back(p.result);
    if (p.result == Result::Win) ++r.wins;
    if (p.result == Result::Draw) ++r.draws;
    if (p.result == Result::Loss) ++r.losses;
  }
  return r;
}

Json match_stats(const MatchSpec& spec, const MatchResult& r) {
  Json agents = Json::array();
  for (const auto& a : spec.agents) agents.push_back(a.name);
  return {{"env", spec.env},
          {"agents", agents},
          {"episodes", r.episodes.size()},
          {"wins", r.wins},
          {"draws", r.draws},
          {"losses", r.losses},
          {"win_rate", r.win_rate()},
          {"mean_return_per_slot", r.mean_returns()},
          {"mean_length", r.mean_length()}};
}

}  // namespace arena
