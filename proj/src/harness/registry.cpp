#include "arena/harness/registry.hpp"

#include <algorithm>

#include "arena/core/canonical.hpp"
#include "arena/core/const_env.hpp"
#include "arena/core/error.hpp"
#include "arena/envs/bomber.hpp"
#include "arena/envs/gridbattle.hpp"
#include "arena/envs/pong.hpp"
#include "arena/interface/generic.hpp"
#include "arena/interface/wrappers.hpp"

namespace arena {

ParamReader::ParamReader(const Json& params, std::string context)
    : params_(params.is_null() ? Json::object() : params), context_(std::move(context)) {
  if (!params_.is_object()) throw ConfigError(context_ + ": params must be a JSON object");
}

const Json* ParamReader::get(const std::string& key) {
  used_.insert(key);
  auto it = params_.find(key);
  return it == params_.end() ? nullptr : &*it;
}

double ParamReader::number(const std::string& key, double fallback) {
  const Json* j = get(key);
  if (!j) return fallback;
  if (!j->is_number()) throw ConfigError(context_ + ": '" + key + "' must be a number");
  return j->get<double>();
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback) {
  const Json* j = get(key);
  if (!j) return fallback;
  if (!j->is_number_integer()) throw ConfigError(context_ + ": '" + key + "' must be an integer");
  return j->get<std::int64_t>();
}

bool ParamReader::flag(const std::string& key, bool fallback) {
  const Json* j = get(key);
  if (!j) return fallback;
  if (!j->is_boolean()) throw ConfigError(context_ + ": '" + key + "' must be true or false");
  return j->get<bool>();
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) {
  const Json* j = get(key);
  if (!j) return fallback;
  if (!j->is_string()) throw ConfigError(context_ + ": '" + key + "' must be a string");
  return j->get<std::string>();
}

Json ParamReader::raw(const std::string& key) {
  const Json* j = get(key);
  return j ? *j : Json();
}

void ParamReader::finish() const {
  for (const auto& [key, _] : params_.items()) {
    if (!used_.count(key)) throw ConfigError(context_ + ": unknown parameter '" + key + "'");
  }
}

void Registry::add_env(std::string name, std::string help, EnvMaker make) {
  envs_[std::move(name)] = {std::move(help), std::move(make)};
}
void Registry::add_agent(std::string name, std::string help, AgentMaker make) {
  agents_[std::move(name)] = {std::move(help), std::move(make)};
}
void Registry::add_interface(std::string name, std::string help, InterfaceMaker make) {
  interfaces_[std::move(name)] = {std::move(help), std::move(make)};
}

std::unique_ptr<Env> Registry::make_env(const std::string& name, const Json& params) const {
  auto it = envs_.find(name);
  if (it == envs_.end()) throw RegistryError("unknown environment '" + name + "'");
  return it->second.make(params);
}

AgentPtr Registry::make_agent(const std::string& name, const Json& params, std::uint64_t seed) const {
  auto it = agents_.find(name);
  if (it == agents_.end()) throw RegistryError("unknown agent '" + name + "'");
  return it->second.make(params, seed);
}

InterfacePtr Registry::make_interface(const Json& spec) const {
  std::string name;
  Json params = Json::object();
  if (spec.is_string()) {
    name = spec.get<std::string>();
  } else if (spec.is_object() && spec.contains("name") && spec.at("name").is_string()) {
    name = spec.at("name").get<std::string>();
    for (const auto& [key, _] : spec.items()) {
      if (key != "name" && key != "params") throw ConfigError("interface spec: unknown field '" + key + "'");
    }
    if (spec.contains("params")) params = spec.at("params");
  } else {
    throw ConfigError("interface spec must be a name or {\"name\", \"params\"}: " + spec.dump());
  }
  auto it = interfaces_.find(name);
  if (it == interfaces_.end()) throw RegistryError("unknown interface '" + name + "'");
  return it->second.make(params, *this);
}

InterfacePtr Registry::make_pipeline(const Json& specs) const {
  if (specs.is_null()) return identity();
  if (!specs.is_array()) return make_interface(specs);
  std::vector<InterfacePtr> layers;
  for (const auto& s : specs) layers.push_back(make_interface(s));
  return pipeline(std::move(layers));
}

namespace {

template <class M>
std::vector<std::pair<std::string, std::string>> listing(const M& m) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, e] : m) out.emplace_back(name, e.help);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> Registry::envs() const { return listing(envs_); }
std::vector<std::pair<std::string, std::string>> Registry::agents() const { return listing(agents_); }
std::vector<std::pair<std::string, std::string>> Registry::interfaces() const { return listing(interfaces_); }

Json parse_component(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return text;
  Json params;
  try {
    params = Json::parse(text.substr(colon + 1));
  } catch (const Json::parse_error& e) {
    throw ConfigError("bad params for '" + text.substr(0, colon) + "': " + e.what());
  }
  return Json{{"name", text.substr(0, colon)}, {"params", params}};
}

namespace {

// Integers become DiscreteV, number arrays VectorV, tagged objects anything.
Value value_param(const Json& j, const std::string& context) {
  if (j.is_number_integer()) return Value::discrete(j.get<std::int64_t>());
  if (j.is_number()) return Value::scalar(j.get<double>());
  if (j.is_array()) {
    std::vector<double> xs;
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(context + ": vector entries must be numbers");
      xs.push_back(x.get<double>());
    }
    return Value::vector(std::move(xs));
  }
  if (j.is_object()) {
    try {
      return value_from_json(j);
    } catch (const FormatError& e) {
      throw ConfigError(context + ": " + e.what());
    }
  }
  throw ConfigError(context + ": expected a value");
}

SlotPartition groups_param(const Json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": 'groups' must be a list of slot lists");
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& g : j) {
    if (!g.is_array()) throw ConfigError(context + ": 'groups' must be a list of slot lists");
    std::vector<std::size_t> group;
    for (const auto& s : g) {
      if (!s.is_number_unsigned()) throw ConfigError(context + ": slot indices must be non-negative integers");
      group.push_back(s.get<std::size_t>());
    }
    groups.push_back(std::move(group));
  }
  return SlotPartition(std::move(groups));
}

SpaceSpec constant_spec(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Discrete:
      return SpaceSpec::discrete(v.index() + 1);
    case Value::Kind::Vector:
    case Value::Kind::Grid: {
      const auto& xs = v.entries();
      const double lo = xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
      const double hi = xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
      if (v.is_grid()) return SpaceSpec::grid(v.shape(), lo, hi);
      return SpaceSpec::vector(xs.size(), lo, hi);
    }
    default:
      throw ConfigError("append_feature: constant features must be discrete, vector or grid");
  }
}

Registry make_builtin() {
  Registry r;

  r.add_env("const", "trivial env: Discrete(0) obs, zero rewards, fixed length (slots, length, actions)",
            [](const Json& p) {
              ParamReader in(p, "const");
              const auto slots = in.integer("slots", 1), length = in.integer("length", 1),
                         actions = in.integer("actions", 1);
              in.finish();
              if (slots <= 0 || length <= 0 || actions <= 0) throw ConfigError("const: parameters must be positive");
              return std::make_unique<ConstEnv>(static_cast<std::size_t>(slots), static_cast<std::size_t>(length),
                                                actions);
            });
  r.add_env("pong2p", "two-player pong (field_w, field_h, paddle_len, ..., win_score, step_limit)", [](const Json& p) {
    ParamReader in(p, "pong2p");
    pong::PongConfig c;
    c.field_w = in.number("field_w", c.field_w);
    c.field_h = in.number("field_h", c.field_h);
    c.paddle_len = in.number("paddle_len", c.paddle_len);
    c.paddle_speed = in.number("paddle_speed", c.paddle_speed);
    c.ball_speed0 = in.number("ball_speed0", c.ball_speed0);
    c.speedup = in.number("speedup", c.speedup);
    c.max_speed = in.number("max_speed", c.max_speed);
    c.max_deflect_deg = in.number("max_deflect_deg", c.max_deflect_deg);
    c.serve_angle_deg = in.number("serve_angle_deg", c.serve_angle_deg);
    c.win_score = static_cast<int>(in.integer("win_score", c.win_score));
    const auto limit = in.integer("step_limit", static_cast<std::int64_t>(c.step_limit));
    if (limit <= 0) throw ConfigError("pong2p: step_limit must be positive");
    c.step_limit = static_cast<std::size_t>(limit);
    in.finish();
    return std::make_unique<pong::PongEnv>(c);
  });
  r.add_env("gridbattle", "8x8 team battle (scenario 5I|3I2Z, randomize_status, randomize_positions, step_limit)",
            [](const Json& p) {
              ParamReader in(p, "gridbattle");
              battle::BattleConfig c;
              c.scenario = in.text("scenario", c.scenario);
              c.randomize_status = in.flag("randomize_status", c.randomize_status);
              c.randomize_positions = in.flag("randomize_positions", c.randomize_positions);
              const auto limit = in.integer("step_limit", static_cast<std::int64_t>(c.step_limit));
              if (limit <= 0) throw ConfigError("gridbattle: step_limit must be positive");
              c.step_limit = static_cast<std::size_t>(limit);
              in.finish();
              return std::make_unique<battle::BattleEnv>(c);
            });
  r.add_env("bomber", "4-agent bomber board (mode ffa|2v2, step_limit, size, bomb_life, ...)", [](const Json& p) {
    ParamReader in(p, "bomber");
    bomber::BomberConfig c;
    const auto mode = in.text("mode", "ffa");
    if (mode == "ffa" || mode == "FFA") c.mode = bomber::Mode::FFA;
    else if (mode == "2v2") c.mode = bomber::Mode::Teams;
    else throw ConfigError("bomber: mode must be ffa or 2v2");
    const auto limit = in.integer("step_limit", static_cast<std::int64_t>(c.step_limit));
    if (limit <= 0) throw ConfigError("bomber: step_limit must be positive");
    c.step_limit = static_cast<std::size_t>(limit);
    c.size = static_cast<int>(in.integer("size", c.size));
    c.bomb_life = static_cast<int>(in.integer("bomb_life", c.bomb_life));
    c.flame_life = static_cast<int>(in.integer("flame_life", c.flame_life));
    c.initial_ammo = static_cast<int>(in.integer("initial_ammo", c.initial_ammo));
    c.initial_blast = static_cast<int>(in.integer("initial_blast", c.initial_blast));
    c.wood_density = in.number("wood_density", c.wood_density);
    c.powerup_prob = in.number("powerup_prob", c.powerup_prob);
    in.finish();
    return std::make_unique<bomber::BomberEnv>(c);
  });

  r.add_agent("random", "uniform samples from the action space", [](const Json& p, std::uint64_t seed) {
    ParamReader in(p, "random");
    in.finish();
    return std::make_unique<RandomAgent>(seed);
  });
  r.add_agent("constant", "always the same action (action: integer, number list or tagged value)",
              [](const Json& p, std::uint64_t) {
                ParamReader in(p, "constant");
                const Json a = in.raw("action");
                in.finish();
                return std::make_unique<ConstantAgent>(a.is_null() ? Value::discrete(0) : value_param(a, "constant"));
              });
  r.add_agent("pong.follow_ball", "tracks the ball vertically (raw pong observation)", [](const Json& p, std::uint64_t) {
    ParamReader(p, "pong.follow_ball").finish();
    return std::make_unique<pong::FollowBallAgent>();
  });
  r.add_agent("battle.hit_and_run", "attacks when ready, retreats on cooldown (raw gridbattle observation)",
              [](const Json& p, std::uint64_t) {
                ParamReader(p, "battle.hit_and_run").finish();
                return std::make_unique<battle::HitAndRunAgent>();
              });
  r.add_agent("bomber.simple", "rule-based bomber player (bomb_life)", [](const Json& p, std::uint64_t) {
    ParamReader in(p, "bomber.simple");
    const auto life = in.integer("bomb_life", bomber::BomberConfig{}.bomb_life);
    in.finish();
    return std::make_unique<bomber::SimpleAgent>(static_cast<int>(life));
  });

  auto no_params = [](const char* name, InterfacePtr (*make)()) {
    return [name, make](const Json& p, const Registry&) {
      ParamReader(p, name).finish();
      return make();
    };
  };
  r.add_interface("identity", "passes everything through", no_params("identity", &identity));
  r.add_interface("map_to_vector", "flattens each slot's observation into a vector",
                  no_params("map_to_vector", &map_to_vector));
  r.add_interface("concat_obs_act", "one outer slot per group with concatenated obs/actions (groups)",
                  [](const Json& p, const Registry&) {
                    ParamReader in(p, "concat_obs_act");
                    auto groups = groups_param(in.raw("groups"), "concat_obs_act");
                    in.finish();
                    return concat_obs_act(std::move(groups));
                  });
  r.add_interface("make_team", "one outer slot per group with sequence obs/actions (groups)",
                  [](const Json& p, const Registry&) {
                    ParamReader in(p, "make_team");
                    auto groups = groups_param(in.raw("groups"), "make_team");
                    in.finish();
                    return make_team(std::move(groups));
                  });
  r.add_interface("append_feature", "adds a constant feature to mapping observations (key, value)",
                  [](const Json& p, const Registry&) {
                    ParamReader in(p, "append_feature");
                    const auto key = in.text("key", "");
                    const Value v = value_param(in.raw("value"), "append_feature");
                    in.finish();
                    if (key.empty()) throw ConfigError("append_feature: 'key' is required");
                    const SpaceSpec s = constant_spec(v);
                    return append_feature(Feature{key, [s](const SpaceSpec&) { return s; },
                                                  [v](const Value&) { return v; }});
                  });
  r.add_interface("scale_obs", "multiplies real observation entries (factor)", [](const Json& p, const Registry&) {
    ParamReader in(p, "scale_obs");
    const double f = in.number("factor", 1.0);
    in.finish();
    return lift_single_wrapper(scale_obs_wrapper(f));
  });
  r.add_interface("scale_reward", "multiplies rewards (factor)", [](const Json& p, const Registry&) {
    ParamReader in(p, "scale_reward");
    const double f = in.number("factor", 1.0);
    in.finish();
    return lift_single_wrapper(scale_reward_wrapper(f));
  });
  r.add_interface("combine", "children side by side over a base (base, children, groups)",
                  [](const Json& p, const Registry& reg) {
                    ParamReader in(p, "combine");
                    InterfacePtr base = reg.make_pipeline(in.raw("base"));
                    const Json children = in.raw("children");
                    auto groups = groups_param(in.raw("groups"), "combine");
                    in.finish();
                    if (!children.is_array()) throw ConfigError("combine: 'children' must be a list of pipelines");
                    std::vector<InterfacePtr> kids;
                    for (const auto& c : children) kids.push_back(reg.make_pipeline(c));
                    return combine(std::move(base), std::move(kids), std::move(groups));
                  });
  r.add_interface("per_agent", "one single-slot pipeline per slot (interfaces)", [](const Json& p, const Registry& reg) {
    ParamReader in(p, "per_agent");
    const Json list = in.raw("interfaces");
    in.finish();
    if (!list.is_array() || list.empty()) throw ConfigError("per_agent: 'interfaces' must be a non-empty list");
    std::vector<InterfacePtr> kids;
    for (const auto& c : list) kids.push_back(reg.make_pipeline(c));
    const auto n = kids.size();
    return combine(identity(), std::move(kids), SlotPartition::singletons(n));
  });
  r.add_interface("pong.screen_obs", "binary raster of the pong field (resolution, default 84)",
                  [](const Json& p, const Registry&) {
                    ParamReader in(p, "pong.screen_obs");
                    const auto res = in.integer("resolution", 84);
                    in.finish();
                    if (res < 16) throw ConfigError("pong.screen_obs: resolution must be at least 16");
                    return pong::screen_obs(static_cast<std::size_t>(res));
                  });
  r.add_interface("battle.img5i", "[8,8,6] egocentric unit map (5I)", no_params("battle.img5i", &battle::img5i));
  r.add_interface("battle.img3i2z", "[8,8,16] egocentric unit map (3I2Z)",
                  no_params("battle.img3i2z", &battle::img3i2z));
  r.add_interface("battle.dead_pad", "encoded map plus alive flag, zeros when dead (encoder)",
                  [](const Json& p, const Registry& reg) {
                    ParamReader in(p, "battle.dead_pad");
                    const Json enc = in.raw("encoder");
                    in.finish();
                    return battle::dead_padding(enc.is_null() ? nullptr : reg.make_pipeline(enc));
                  });
  r.add_interface("bomber.board_map", "appends an [n,n,8] one-hot board map",
                  no_params("bomber.board_map", &bomber::board_map_obs));
  r.add_interface("bomber.attr", "appends ammo, blast, alive and time", no_params("bomber.attr", &bomber::attr_obs));
  r.add_interface("bomber.act_mask", "appends the legal-action mask",
                  no_params("bomber.act_mask", &bomber::act_mask_obs));
  r.add_interface("bomber.rotate", "rotates each agent's view so it starts top-left",
                  no_params("bomber.rotate", &bomber::rotate_itf));
  return r;
}

}  // namespace

const Registry& Registry::builtin() {
  static const Registry r = make_builtin();
  return r;
}

}  // namespace arena
