#include <doctest.h>

#include <fstream>
#include <sstream>

#include "arena/core/const_env.hpp"
#include "arena/core/error.hpp"
#include "arena/envs/pong.hpp"
#include "arena/harness/match.hpp"
#include "arena/harness/registry.hpp"
#include "arena/harness/replay.hpp"
#include "arena/harness/tournament.hpp"

using namespace arena;

namespace {

const Registry& reg() { return Registry::builtin(); }

MatchSpec spec_of(const std::string& json) { return MatchSpec::from_json(Json::parse(json)); }

std::string replay_of(const MatchSpec& spec, MatchResult* out = nullptr) {
  std::ostringstream os;
  MatchResult r = run_match(spec, reg(), &os);
  if (out) *out = std::move(r);
  return os.str();
}

Json load(const std::string& name) {
  std::ifstream in(std::string(ARENA_TEST_DATA) + "/" + name);
  REQUIRE(in);
  return Json::parse(in);
}

// Step lines only: the header names the match, which differs between
// equivalent setups.
std::vector<std::string> step_lines(const std::string& replay) {
  std::vector<std::string> out;
  std::istringstream in(replay);
  for (std::string line; std::getline(in, line);) {
    if (line.find(R"("type":"header")") == std::string::npos) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("single episode on the trivial env") {
  ConstEnv env;
  std::vector<Seat> seats;
  seats.push_back({std::make_unique<ConstantAgent>(Value::discrete(0)), {0}});
  const auto o = run_episode(env, seats, 0);
  CHECK(o.length == 1);
  CHECK(o.returns == std::vector<double>{0.0});
  CHECK(classify(o, {0}) == Result::Draw);
}

TEST_CASE("episode runner errors name the slot") {
  pong::PongEnv env;
  std::vector<Seat> seats;
  seats.push_back({std::make_unique<RandomAgent>(1), {0}});
  seats.push_back({std::make_unique<ConstantAgent>(Value::discrete(7)), {1}});
  try {
    run_episode(env, seats, 0);
    FAIL("expected a SpaceMismatch");
  } catch (const SpaceMismatch& e) {
    CHECK(e.slot() == std::optional<std::size_t>(1));
    CHECK(std::string(e.what()).find("constant") != std::string::npos);
  }

  std::vector<Seat> short_seats;
  short_seats.push_back({std::make_unique<RandomAgent>(1), {0}});
  CHECK_THROWS_AS(run_episode(env, short_seats, 0), SetupError);

  CHECK_THROWS_AS(run_match(spec_of(R"({"env":"pong2p","agents":["random","random","random"]})"), reg()), ConfigError);
  CHECK_THROWS_AS(run_match(spec_of(R"({"env":"nope","agents":["random"]})"), reg()), RegistryError);
  CHECK_THROWS_AS(spec_of(R"({"env":"pong2p","agents":["random"],"epsiodes":3})"), ConfigError);
  CHECK_THROWS_AS(run_match(spec_of(R"({"env":{"name":"pong2p","params":{"win_scor":3}},"agents":["random","random"]})"), reg()),
                  ConfigError);
}

TEST_CASE("match statistics") {
  MatchResult r;
  const auto spec = spec_of(R"({"env":"pong2p","agents":["pong.follow_ball","random"],"episodes":20,"seed":3})");
  replay_of(spec, &r);
  CHECK(r.episodes.size() == 20);
  CHECK(r.wins + r.draws + r.losses == 20);
  CHECK(r.win_rate() == doctest::Approx((r.wins + 0.5 * r.draws) / 20.0));
  for (std::size_t k = 0; k < 20; ++k) CHECK(r.episodes[k].seed == 3 + k);
  const Json stats = match_stats(spec, r);
  for (const char* key : {"env", "agents", "episodes", "wins", "draws", "losses", "win_rate", "mean_return_per_slot", "mean_length"}) {
    CHECK(stats.contains(key));
  }

  const auto empty = spec_of(R"({"env":"pong2p","agents":["random","random"],"episodes":0})");
  const MatchResult none = run_match(empty, reg());
  CHECK(none.episodes.empty());
  CHECK_THROWS_AS(none.win_rate(), ConfigError);
}

TEST_CASE("follow-ball mirror matches terminate") {
  MatchResult r;
  replay_of(spec_of(R"({"env":{"name":"pong2p","params":{"step_limit":1500}},"agents":["pong.follow_ball","pong.follow_ball"],"episodes":6})"), &r);
  for (const auto& e : r.episodes) CHECK(e.length <= 1500);
  CHECK(r.wins + r.draws + r.losses == 6);
}

TEST_CASE("side-swapped mirror matches are symmetric") {
  const auto a = spec_of(R"({"env":"gridbattle","agents":[{"name":"battle.hit_and_run","slots":[0,1,2,3,4]},
                            {"name":"battle.hit_and_run","slots":[5,6,7,8,9]}],"episodes":10,"seed":40})");
  const auto b = spec_of(R"({"env":"gridbattle","agents":[{"name":"battle.hit_and_run","slots":[5,6,7,8,9]},
                            {"name":"battle.hit_and_run","slots":[0,1,2,3,4]}],"episodes":10,"seed":40})");
  const MatchResult x = run_match(a, reg());
  const MatchResult y = run_match(b, reg());
  CHECK(x.wins == y.losses);
  CHECK(x.losses == y.wins);
  CHECK(x.draws == y.draws);
}

TEST_CASE("replays are deterministic and independent of threads") {
  auto spec = spec_of(R"({"env":"bomber","agents":["bomber.simple","random","bomber.simple","random"],"episodes":6,"seed":9})");
  const std::string once = replay_of(spec);
  CHECK(once == replay_of(spec));
  spec.threads = 4;
  CHECK(once == replay_of(spec));
  std::istringstream in(once);
  const auto rep = verify_replay(in, reg());
  CHECK(rep.ok);
  CHECK(rep.episodes == 6);
}

TEST_CASE("replay verification catches tampering") {
  const std::string text = replay_of(spec_of(R"({"env":"pong2p","agents":["pong.follow_ball","random"],"episodes":2,"seed":5})"));
  {
    std::istringstream in(text);
    CHECK(verify_replay(in, reg()).ok);
  }
  // Swap one recorded action for another legal one.
  std::string changed = text;
  const auto pos = changed.find(R"("actions":[{"d":0})");
  REQUIRE(pos != std::string::npos);
  changed.replace(pos, 18, R"("actions":[{"d":1})");
  std::istringstream in(changed);
  const auto rep = verify_replay(in, reg());
  CHECK_FALSE(rep.ok);
  CHECK(rep.step.has_value());

  std::istringstream junk("{\"type\":\"header\"\n");
  CHECK_THROWS_AS(verify_replay(junk, reg()), FormatError);
  std::istringstream spaced(std::string(" ") + text);
  CHECK_THROWS_AS(verify_replay(spaced, reg()), FormatError);

  std::string unknown = text;
  const auto at = unknown.find(R"("name":"pong2p")");
  unknown.replace(at, 15, R"("name":"pong3p")");
  std::istringstream u(unknown);
  CHECK_THROWS_AS(verify_replay(u, reg()), RegistryError);
}

TEST_CASE("replay header") {
  const std::string text = replay_of(spec_of(R"({"env":"const","agents":["random"],"episodes":1,"seed":12})"));
  std::istringstream in(text);
  std::string first;
  std::getline(in, first);
  const Json h = Json::parse(first);
  CHECK(h.at("format") == 1);
  CHECK(h.at("toolkit") == kToolkitVersion);
  CHECK(h.at("seed") == 12);
  CHECK(h.at("match").at("env").at("name") == "const");
}

TEST_CASE("train-time and test-time wrapping are configuration only") {
  const MatchSpec train = MatchSpec::from_json(load("train_config.json"));
  const MatchSpec test = MatchSpec::from_json(load("test_config.json"));
  MatchResult a, b;
  const std::string x = replay_of(train, &a);
  const std::string y = replay_of(test, &b);
  CHECK(step_lines(x) == step_lines(y));
  CHECK(a.results == b.results);
}

TEST_CASE("env-side teams") {
  const auto spec = spec_of(R"({"env":"gridbattle",
    "env_interfaces":[{"name":"make_team","params":{"groups":[[0,1,2,3,4],[5,6,7,8,9]]}}],
    "agents":["random","random"],"episodes":4,"seed":1})");
  MatchResult r;
  const std::string text = replay_of(spec, &r);
  CHECK(r.wins + r.draws + r.losses == 4);
  std::istringstream in(text);
  CHECK(verify_replay(in, reg()).ok);
}

TEST_CASE("agent-side teams") {
  const auto spec = spec_of(R"({"env":"gridbattle","agents":[
    {"name":"random","interfaces":[{"name":"make_team","params":{"groups":[[0,1,2,3,4]]}}]},
    "battle.hit_and_run"],"episodes":4,"seed":2})");
  MatchResult r;
  replay_of(spec, &r);
  CHECK(r.losses >= 3);
}

TEST_CASE("scoreboard") {
  Scoreboard s({"a", "b", "c"});
  s.add(0, 1, Result::Win);
  s.add(0, 1, Result::Draw);
  s.add(2, 0, Result::Loss);
  CHECK(s.record(0, 1).wins == 1);
  CHECK(s.record(1, 0).losses == 1);
  CHECK(s.record(1, 0).draws == 1);
  CHECK(s.record(0, 2).wins == 1);
  CHECK(s.points(0) == 2.5);
  CHECK(s.points(1) == 0.5);
  CHECK_FALSE(s.win_rate(0, 0).has_value());
  CHECK_FALSE(s.win_rate(1, 2).has_value());
  CHECK(s.win_rate(0, 1) == std::optional<double>(0.75));
  const Json j = s.to_json();
  CHECK(j.at("win_rate")[1][1].is_null());
  CHECK_THROWS(s.add(1, 1, Result::Win));
}

TEST_CASE("round robin") {
  const TournamentSpec spec = TournamentSpec::from_json(load("tourney3.json"));
  const Scoreboard board = round_robin(spec, reg());
  CHECK(board.size() == 3);
  CHECK(board.names()[2] == "idle");
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(board.record(i, j).played() == 4);
      CHECK(board.record(i, j).wins == board.record(j, i).losses);
      pairs += i < j;
    }
  }
  CHECK(pairs == 3);
  const Json j = board.to_json();
  for (std::size_t i = 0; i < 3; ++i) CHECK(j.at("win_rate")[i][i].is_null());

  TournamentSpec lonely = spec;
  lonely.entrants.resize(1);
  CHECK_THROWS_AS(round_robin(lonely, reg()), ConfigError);
}
