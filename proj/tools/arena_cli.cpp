#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "arena/core/error.hpp"
#include "arena/harness/match.hpp"
#include "arena/harness/registry.hpp"
#include "arena/harness/replay.hpp"
#include "arena/harness/tournament.hpp"

using namespace arena;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

void print_listing(const std::vector<std::pair<std::string, std::string>>& items) {
  std::size_t width = 0;
  for (const auto& [name, _] : items) width = std::max(width, name.size());
  for (const auto& [name, help] : items) {
    std::cout << name << std::string(width + 2 - name.size(), ' ') << help << '\n';
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// "k=v": v is parsed as JSON when it parses, otherwise taken as a string.
std::pair<std::string, Json> parse_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + kv + "'");
  const std::string value = kv.substr(eq + 1);
  Json v = Json::parse(value, nullptr, false);
  if (v.is_discarded()) v = value;
  return {kv.substr(0, eq), v};
}

// Splits on commas outside brackets, so "a:{\"x\":1,\"y\":2},b" is two items.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '{' || c == '[') ++depth;
    if (c == '}' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct RunArgs {
  std::string config;
  std::string env;
  std::vector<std::string> params;
  std::string mode;
  std::string agents;
  std::vector<std::string> env_itfs;
  std::vector<std::string> agent_itfs;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string replay;
  bool json = false;
};

MatchSpec spec_from_args(const RunArgs& a) {
  MatchSpec spec;
  if (!a.config.empty()) {
    spec = MatchSpec::from_json(read_json_file(a.config));
  } else {
    if (a.env.empty() || a.agents.empty()) throw ConfigError("run needs --env and --agents, or --config");
    spec.env = a.env;
    spec.episodes = a.episodes;
    spec.seed = a.seed;
    spec.threads = a.threads;
    for (const auto& p : a.params) {
      auto [k, v] = parse_param(p);
      spec.env_params[k] = v;
    }
    if (!a.mode.empty()) spec.env_params["mode"] = a.mode;
    for (const auto& itf : a.env_itfs) spec.env_interfaces.push_back(parse_component(itf));
    for (const auto& item : split_top(a.agents)) spec.agents.push_back(AgentEntry::from_json(parse_component(item)));
    for (const auto& itf : a.agent_itfs) {
      const auto colon = itf.find(':');
      std::size_t k = 0;
      try {
        k = std::stoul(itf.substr(0, colon));
      } catch (const std::exception&) {
        throw ConfigError("--agent-itf expects INDEX:NAME[:JSON], got '" + itf + "'");
      }
      if (colon == std::string::npos || k >= spec.agents.size()) {
        throw ConfigError("--agent-itf expects INDEX:NAME[:JSON] with a valid agent index, got '" + itf + "'");
      }
      spec.agents[k].interfaces.push_back(parse_component(itf.substr(colon + 1)));
    }
  }
  if (!a.replay.empty()) spec.replay = a.replay;
  return spec;
}

int cmd_run(const RunArgs& a) {
  const MatchSpec spec = spec_from_args(a);
  const Registry& reg = Registry::builtin();
  std::ofstream replay;
  if (!spec.replay.empty()) {
    replay.open(spec.replay, std::ios::binary);
    if (!replay) throw ConfigError("cannot write " + spec.replay);
  }
  const MatchResult r = run_match(spec, reg, spec.replay.empty() ? nullptr : &replay);
  const Json stats = match_stats(spec, r);
  if (a.json) {
    std::cout << stats.dump() << '\n';
  } else {
    std::cout << spec.env << ": " << stats.at("agents").dump() << '\n'
              << "episodes " << r.episodes.size() << "  wins " << r.wins << "  draws " << r.draws << "  losses "
              << r.losses << "  win-rate " << r.win_rate() << "  mean length " << r.mean_length() << '\n';
  }
  return 0;
}

int cmd_tourney(const std::string& config, bool json) {
  const TournamentSpec spec = TournamentSpec::from_json(read_json_file(config));
  const Scoreboard board = round_robin(spec, Registry::builtin());
  if (json) {
    std::cout << board.to_json().dump() << '\n';
    return 0;
  }
  const auto& names = board.names();
  std::size_t width = 6;
  for (const auto& n : names) width = std::max(width, n.size() + 2);
  std::cout << std::string(width, ' ');
  for (const auto& n : names) std::cout << n.substr(0, 8) << std::string(10 - std::min<std::size_t>(8, n.size()), ' ');
  std::cout << "points\n";
  for (std::size_t i = 0; i < board.size(); ++i) {
    std::cout << names[i] << std::string(width - names[i].size(), ' ');
    for (std::size_t j = 0; j < board.size(); ++j) {
      const auto w = board.win_rate(i, j);
      char cell[16];
      if (w) std::snprintf(cell, sizeof cell, "%-10.3f", *w);
      else std::snprintf(cell, sizeof cell, "%-10s", "-");
      std::cout << cell;
    }
    std::cout << board.points(i) << '\n';
  }
  return 0;
}

int cmd_verify(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  const VerifyReport rep = verify_replay(in, Registry::builtin());
  if (rep.ok) {
    std::cout << "ok: " << rep.episodes << " episodes, " << rep.steps << " steps\n";
    return 0;
  }
  std::cout << "divergence in episode " << *rep.episode;
  if (rep.step) std::cout << " at step " << *rep.step;
  std::cout << ": " << rep.message << '\n';
  return kRuntime;
}

int cmd_render(const std::string& path, double fps, std::optional<std::size_t> only) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  const auto episodes = read_replay(in);
  const auto pause = std::chrono::duration<double>(fps > 0 ? 1.0 / fps : 0.0);
  const bool animate = fps > 0;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    if (only && *only != e) continue;
    const auto& ep = episodes[e];
    auto env = env_from_header(ep.header, Registry::builtin());
    env->reset(ep.header.at("seed").get<std::uint64_t>());
    auto frame = [&](std::size_t t) {
      if (animate) std::cout << "\x1b[H\x1b[2J";
      std::cout << "episode " << e << "  step " << t << "/" << ep.actions.size() << '\n' << env->render() << '\n';
      std::cout.flush();
      if (animate) std::this_thread::sleep_for(pause);
    };
    frame(0);
    for (std::size_t t = 0; t < ep.actions.size(); ++t) {
      env->step(ep.actions[t]);
      frame(t + 1);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent environments, interfaces and match harness"};
  app.require_subcommand(1);

  auto* list_envs = app.add_subcommand("list-envs", "List registered environments");
  auto* list_agents = app.add_subcommand("list-agents", "List registered agents");
  auto* list_itfs = app.add_subcommand("list-interfaces", "List registered interfaces");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Play a match and print statistics");
  run_cmd->add_option("--config", run.config, "MatchSpec JSON file (replaces the flags below)");
  run_cmd->add_option("--env", run.env, "Environment name");
  run_cmd->add_option("--param", run.params, "Environment parameter key=value (repeatable)");
  run_cmd->add_option("--mode", run.mode, "Shorthand for --param mode=VALUE");
  run_cmd->add_option("--agents", run.agents, "Comma-separated agent names, one per side");
  run_cmd->add_option("--env-itf", run.env_itfs, "Env-side interface NAME[:JSON], innermost first (repeatable)");
  run_cmd->add_option("--agent-itf", run.agent_itfs, "Agent-side interface INDEX:NAME[:JSON] (repeatable)");
  run_cmd->add_option("--episodes", run.episodes, "Number of episodes")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--seed", run.seed, "Base seed; episode k uses seed + k");
  run_cmd->add_option("--threads", run.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--replay", run.replay, "Write a JSON Lines replay to PATH");
  run_cmd->add_flag("--json", run.json, "Print statistics as JSON");

  std::string tourney_config;
  bool tourney_json = false;
  auto* tourney = app.add_subcommand("tourney", "Play a round robin");
  tourney->add_option("--config", tourney_config, "Tournament JSON file")->required();
  tourney->add_flag("--json", tourney_json, "Print the scoreboard as JSON");

  std::string verify_path;
  auto* verify = app.add_subcommand("verify-replay", "Re-simulate a replay and compare state hashes");
  verify->add_option("path", verify_path, "Replay file")->required();

  std::string render_path;
  double fps = 10.0;
  std::optional<std::size_t> render_episode;
  auto* render = app.add_subcommand("render", "Show a replay as ASCII frames");
  render->add_option("path", render_path, "Replay file")->required();
  render->add_option("--fps", fps, "Frames per second; 0 prints every frame without pausing")->check(CLI::NonNegativeNumber);
  render->add_option("--episode", render_episode, "Only this episode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*list_envs) print_listing(Registry::builtin().envs());
    if (*list_agents) print_listing(Registry::builtin().agents());
    if (*list_itfs) print_listing(Registry::builtin().interfaces());
    if (*run_cmd) return cmd_run(run);
    if (*tourney) return cmd_tourney(tourney_config, tourney_json);
    if (*verify) return cmd_verify(verify_path);
    if (*render) return cmd_render(render_path, fps, render_episode);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return 0;
}
