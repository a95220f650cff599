#include "arena/harness/replay.hpp"

#include "arena/core/canonical.hpp"
#include "arena/core/error.hpp"
#include "arena/envs/outcome.hpp"
#include "arena/harness/match.hpp"

namespace arena {

ReplayRecorder::ReplayRecorder(Json match, std::size_t episode) : match_(std::move(match)), episode_(episode) {}

void ReplayRecorder::line(const Json& j) {
  text_ += j.dump();
  text_ += '\n';
}

void ReplayRecorder::on_reset(std::uint64_t seed, const Bundle& obs, std::uint64_t state_hash) {
  returns_.assign(obs.size(), 0.0);
  t_ = 0;
  line({{"type", "header"},
        {"format", kReplayFormat},
        {"toolkit", kToolkitVersion},
        {"match", match_},
        {"episode", episode_},
        {"seed", seed},
        {"slots", obs.size()},
        {"initial_hash", hex64(state_hash)}});
}

void ReplayRecorder::on_step(const Bundle& actions, const StepResult& result, std::uint64_t state_hash) {
  Json acts = Json::array();
  for (const auto& a : actions) acts.push_back(value_to_json(a));
  for (std::size_t i = 0; i < returns_.size() && i < result.rewards.size(); ++i) returns_[i] += result.rewards[i];
  line({{"type", "step"},
        {"t", t_++},
        {"actions", acts},
        {"rewards", result.rewards},
        {"done", result.done},
        {"hash", hex64(state_hash)}});
  if (result.done) {
    const auto w = winner_slots(result.info);
    line({{"type", "outcome"}, {"winner", w ? Json(*w) : Json()}, {"returns", returns_}, {"length", t_}});
  }
}

namespace {

const Json& field(const Json& j, const char* key, std::size_t lineno) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError("replay line " + std::to_string(lineno) + ": missing '" + key + "'");
  return *it;
}

std::uint64_t hash_field(const Json& j, const char* key, std::size_t lineno) {
  const Json& h = field(j, key, lineno);
  if (!h.is_string()) throw FormatError("replay line " + std::to_string(lineno) + ": '" + key + "' must be a string");
  return parse_hex64(h.get<std::string>());
}

}  // namespace

std::vector<ReplayEpisode> read_replay(std::istream& in) {
  std::vector<ReplayEpisode> out;
  std::string text;
  std::size_t lineno = 0;
  bool open = false;  // inside an episode that has not seen its outcome
  while (std::getline(in, text)) {
    ++lineno;
    const std::string where = "replay line " + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!j.is_object()) throw FormatError(where + ": expected an object");
    if (j.dump() != text) throw FormatError(where + ": not in canonical form");
    const Json& type = field(j, "type", lineno);
    if (type == "header") {
      if (open) throw FormatError(where + ": header before the previous episode's outcome");
      if (field(j, "format", lineno) != kReplayFormat) throw FormatError(where + ": unsupported format");
      if (!field(j, "seed", lineno).is_number_unsigned()) throw FormatError(where + ": bad seed");
      hash_field(j, "initial_hash", lineno);
      field(j, "match", lineno);
      out.push_back({j, {}, {}, {}});
      open = true;
    } else if (type == "step") {
      if (!open) throw FormatError(where + ": step outside an episode");
      auto& ep = out.back();
      if (field(j, "t", lineno) != ep.actions.size()) throw FormatError(where + ": steps out of order");
      const Json& acts = field(j, "actions", lineno);
      if (!acts.is_array()) throw FormatError(where + ": 'actions' must be a list");
      Bundle b;
      for (const auto& a : acts) b.push_back(value_from_json(a));
      const Json& done = field(j, "done", lineno);
      if (!done.is_boolean()) throw FormatError(where + ": 'done' must be a boolean");
      ep.actions.push_back(std::move(b));
      ep.hashes.push_back(hash_field(j, "hash", lineno));
      ep.done.push_back(done.get<bool>());
    } else if (type == "outcome") {
      if (!open) throw FormatError(where + ": outcome outside an episode");
      if (field(j, "length", lineno) != out.back().actions.size()) {
        throw FormatError(where + ": outcome length disagrees with the step count");
      }
      open = false;
    } else {
      throw FormatError(where + ": unknown record type");
    }
  }
  if (open) throw FormatError("replay ends inside an episode");
  if (out.empty()) throw FormatError("replay contains no episodes");
  return out;
}

std::unique_ptr<Env> env_from_header(const Json& header, const Registry& registry) {
  const Json& match = header.at("match");
  if (!match.is_object() || !match.contains("env") || !match.at("env").is_object() ||
      !match.at("env").contains("name") || !match.at("env").at("name").is_string()) {
    throw FormatError("replay header: match.env.name missing");
  }
  const Json& env = match.at("env");
  return registry.make_env(env.at("name").get<std::string>(), env.value("params", Json::object()));
}

VerifyReport verify_replay(std::istream& in, const Registry& registry) {
  const auto episodes = read_replay(in);
  VerifyReport rep;
  auto fail = [&](std::size_t ep, std::optional<std::size_t> step, std::string msg) {
    rep.ok = false;
    rep.episode = ep;
    rep.step = step;
    rep.message = std::move(msg);
    return rep;
  };
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& ep = episodes[e];
    auto env = env_from_header(ep.header, registry);
    env->reset(ep.header.at("seed").get<std::uint64_t>());
    if (env->state_hash() != parse_hex64(ep.header.at("initial_hash").get<std::string>())) {
      return fail(e, std::nullopt, "initial state differs");
    }
    for (std::size_t t = 0; t < ep.actions.size(); ++t) {
      StepResult r;
      try {
        r = env->step(ep.actions[t]);
      } catch (const Error& err) {
        return fail(e, t, std::string("recorded action rejected: ") + err.what());
      }
      ++rep.steps;
      if (env->state_hash() != ep.hashes[t]) return fail(e, t, "state hash differs");
      if (r.done != ep.done[t]) return fail(e, t, "termination differs");
      if (r.done && t + 1 != ep.actions.size()) return fail(e, t, "episode ended early");
    }
    if (!env->done()) return fail(e, ep.actions.size(), "episode did not end");
    ++rep.episodes;
  }
  return rep;
}

}  // namespace arena
