#include <doctest.h>

#include <set>

#include "arena/core/agent.hpp"
#include "arena/core/error.hpp"
#include "arena/envs/gridbattle.hpp"
#include "arena/envs/outcome.hpp"
#include "arena/interface/wrappers.hpp"

using namespace arena;
using namespace arena::battle;

namespace {

Unit unit(int team, int kind, int row, int col) {
  Unit u;
  u.team = team;
  u.kind = kind;
  u.row = row;
  u.col = col;
  u.hp = kKinds[static_cast<std::size_t>(kind)].max_hp;
  u.shield = kKinds[static_cast<std::size_t>(kind)].max_shield;
  return u;
}

std::vector<std::int64_t> random_actions(std::size_t n, RngStream& rng) {
  std::vector<std::int64_t> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(static_cast<std::int64_t>(rng.below(9)));
  return a;
}

Bundle as_bundle(const std::vector<std::int64_t>& a) {
  Bundle b;
  for (auto x : a) b.push_back(Value::discrete(x));
  return b;
}

double total_health(const BattleState& s) {
  double t = 0;
  for (const auto& u : s.units) t += u.hp + u.shield;
  return t;
}

// Random mid-episode states reached by random play.
std::vector<BattleState> random_states(const BattleConfig& cfg, std::size_t count, std::uint64_t seed) {
  std::vector<BattleState> out;
  BattleEnv env(cfg);
  RngStream rng(seed);
  while (out.size() < count) {
    env.reset(rng.next_u64());
    const auto len = rng.below(40);
    for (std::size_t t = 0; t < len && !env.done(); ++t) env.step(as_bundle(random_actions(env.slot_count(), rng)));
    out.push_back(env.state());
  }
  return out;
}

}  // namespace

TEST_CASE("battle construction") {
  BattleEnv five;
  CHECK(five.slot_count() == 10);
  five.reset(1);
  for (const auto& u : five.state().units) {
    CHECK(u.hp == u.stats().max_hp);
    CHECK(u.shield == u.stats().max_shield);
    CHECK(u.cd == 0);
    CHECK(u.kind == kRanged);
  }
  CHECK(five.teams() == std::vector<std::vector<std::size_t>>{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}});

  BattleConfig mixed;
  mixed.scenario = "3I2Z";
  BattleEnv env(mixed);
  CHECK(env.slot_count() == 10);
  env.reset(1);
  CHECK(env.state().units[3].kind == kMelee);

  BattleConfig bad;
  bad.scenario = "MAB";
  CHECK_THROWS_AS(BattleEnv{bad}, ConfigError);

  BattleEnv a, b;
  a.reset(77);
  b.reset(77);
  CHECK(a.state_hash() == b.state_hash());
  b.reset(78);
  CHECK(a.state_hash() != b.state_hash());

  BattleConfig noisy;
  noisy.randomize_status = true;
  BattleEnv c(noisy);
  c.reset(3);
  bool varied = false;
  for (const auto& u : c.state().units) {
    CHECK((u.hp >= 0.5 * u.stats().max_hp && u.hp <= u.stats().max_hp));
    CHECK((u.cd >= 0 && u.cd <= u.stats().cooldown));
    varied |= u.hp != u.stats().max_hp;
  }
  CHECK(varied);
}

TEST_CASE("battle movement rules") {
  BattleState s;
  s.units = {unit(0, kRanged, 0, 3), unit(1, kRanged, 7, 7)};
  const auto r = resolve_step(s, {0, 8});
  CHECK(r.next.units[0].row == 0);
  CHECK(r.next.units[0].col == 3);

  // Contested cell goes to the lower slot; the other stays.
  BattleState c;
  c.units = {unit(0, kRanged, 3, 2), unit(0, kRanged, 3, 4), unit(1, kRanged, 7, 7)};
  const auto rc = resolve_step(c, {2, 6, 8});
  CHECK(rc.next.units[0].col == 3);
  CHECK(rc.next.units[1].col == 4);

  // Moving into a cell occupied at the start of the tick is cancelled.
  BattleState o;
  o.units = {unit(0, kRanged, 3, 2), unit(0, kRanged, 3, 3), unit(1, kRanged, 7, 7)};
  const auto ro = resolve_step(o, {2, 2, 8});
  CHECK(ro.next.units[0].col == 2);
  CHECK(ro.next.units[1].col == 4);
}

TEST_CASE("battle simultaneous attacks") {
  BattleState s;
  s.units = {unit(0, kRanged, 3, 3), unit(1, kRanged, 3, 4)};
  const auto r = resolve_step(s, {kAttack, kAttack});
  CHECK(r.next.units[0].shield == 30.0);
  CHECK(r.next.units[1].shield == 30.0);
  CHECK(r.damage_dealt == std::vector<double>{20.0, 20.0});
  CHECK(r.next.units[0].cd == kKinds[kRanged].cooldown - 1);

  // Shield absorbs first, then hp.
  BattleState t;
  t.units = {unit(0, kRanged, 3, 3), unit(1, kRanged, 3, 4)};
  t.units[1].shield = 5.0;
  const auto rt = resolve_step(t, {kAttack, 0});
  CHECK(rt.next.units[1].shield == 0.0);
  CHECK(rt.next.units[1].hp == 85.0);

  // Out of range or on cooldown: nothing happens.
  BattleState far;
  far.units = {unit(0, kRanged, 0, 0), unit(1, kRanged, 7, 7)};
  far.units[0].cd = 0;
  CHECK(resolve_step(far, {kAttack, kAttack}).damage_dealt == std::vector<double>{0.0, 0.0});
}

TEST_CASE("battle nearest-enemy tie-break") {
  BattleState s;
  s.units = {unit(0, kRanged, 4, 4), unit(1, kRanged, 4, 2), unit(1, kRanged, 4, 6)};
  CHECK(nearest_enemy(s, 0) == std::optional<std::size_t>(1));
  s.units = {unit(0, kRanged, 4, 4), unit(1, kRanged, 4, 6), unit(1, kRanged, 4, 2)};
  CHECK(nearest_enemy(s, 0) == std::optional<std::size_t>(1));
  s.units[1].alive = false;
  CHECK(nearest_enemy(s, 0) == std::optional<std::size_t>(2));
  // Euclidean, not Chebyshev: (2,2) off is farther than (0,2).
  s.units = {unit(0, kRanged, 4, 4), unit(1, kRanged, 2, 2), unit(1, kRanged, 4, 6)};
  CHECK(nearest_enemy(s, 0) == std::optional<std::size_t>(2));
}

TEST_CASE("battle invariants under random play") {
  for (const char* scenario : {"5I", "3I2Z"}) {
    BattleConfig cfg;
    cfg.scenario = scenario;
    cfg.randomize_status = true;
    BattleEnv env(cfg);
    RngStream rng(21);
    for (int ep = 0; ep < 30; ++ep) {
      env.reset(rng.next_u64());
      while (!env.done()) {
        const auto actions = random_actions(env.slot_count(), rng);
        const BattleState before = env.state();
        const Resolution res = resolve_step(before, actions);
        double dealt = 0;
        for (double d : res.damage_dealt) dealt += d;
        CHECK(total_health(before) - total_health(res.next) == doctest::Approx(dealt).epsilon(1e-12));

        const auto r = env.step(as_bundle(actions));
        std::set<std::pair<int, int>> cells;
        for (const auto& u : env.state().units) {
          if (u.alive) CHECK(cells.insert({u.row, u.col}).second);
        }
        if (r.done && winner_slots(r.info) && !winner_slots(r.info)->empty()) {
          double terminal = 0;
          for (std::size_t i = 0; i < r.rewards.size(); ++i) terminal += r.rewards[i] - res.damage_dealt[i] / 100.0;
          CHECK(terminal == doctest::Approx(0.0));
        }
      }
      CHECK(env.elapsed() <= cfg.step_limit);
    }
  }
}

TEST_CASE("img5i encoder") {
  BattleConfig cfg;
  cfg.randomize_status = true;
  auto itf = img5i();
  const auto n = 10u;
  const Specs& outer = itf->setup({std::vector<SpaceSpec>(n, observation_spec(cfg)), std::vector<SpaceSpec>(n, SpaceSpec::discrete(9))});
  CHECK(outer.obs[0] == SpaceSpec::grid({8, 8, 6}, 0, 1));
  for (const auto& s : random_states(cfg, 100, 4)) {
    Bundle raw;
    for (std::size_t i = 0; i < n; ++i) raw.push_back(observe(cfg, s, i));
    const auto enc = itf->obs_trans(raw, std::vector<double>(n, 0.0)).obs;
    const auto again = itf->obs_trans(raw, std::vector<double>(n, 0.0)).obs;
    CHECK(enc == again);
    for (std::size_t self = 0; self < n; self += 7) {
      const auto& px = enc[self].entries();
      const int mine = s.units[self].team;
      double sums[6] = {};
      for (std::size_t cell = 0; cell < 64; ++cell) {
        double any = 0;
        for (std::size_t ch = 0; ch < 6; ++ch) {
          sums[ch] += px[cell * 6 + ch];
          any += px[cell * 6 + ch];
        }
        const int r = static_cast<int>(cell / 8), c = static_cast<int>(cell % 8);
        const bool occupied = std::any_of(s.units.begin(), s.units.end(),
                                          [&](const Unit& u) { return u.alive && u.row == r && u.col == c; });
        if (!occupied) CHECK(any == 0.0);
      }
      double want[6] = {};
      for (const auto& u : s.units) {
        if (!u.alive) continue;
        const std::size_t side = u.team == mine ? 0 : 1;
        want[side * 3 + 0] += u.hp / u.stats().max_hp;
        want[side * 3 + 1] += u.shield / u.stats().max_shield;
        want[side * 3 + 2] += static_cast<double>(u.cd) / u.stats().cooldown;
      }
      for (int ch = 0; ch < 6; ++ch) CHECK(sums[ch] == doctest::Approx(want[ch]));
    }
  }
  BattleConfig mixed;
  mixed.scenario = "3I2Z";
  auto wrong = img5i();
  CHECK_THROWS_AS(wrong->setup({{observation_spec(mixed)}, {SpaceSpec::discrete(9)}}), SetupError);
}

TEST_CASE("img3i2z encoder") {
  BattleConfig cfg;
  cfg.scenario = "3I2Z";
  cfg.randomize_status = true;
  auto itf = img3i2z();
  const auto n = 10u;
  const Specs& outer = itf->setup({std::vector<SpaceSpec>(n, observation_spec(cfg)), std::vector<SpaceSpec>(n, SpaceSpec::discrete(9))});
  CHECK(outer.obs[0] == SpaceSpec::grid({8, 8, 16}, 0, 1));
  for (const auto& s : random_states(cfg, 100, 5)) {
    Bundle raw;
    for (std::size_t i = 0; i < n; ++i) raw.push_back(observe(cfg, s, i));
    const auto enc = itf->obs_trans(raw, std::vector<double>(n, 0.0)).obs;
    const auto& px = enc[0].entries();
    std::size_t counted[2][2] = {};
    for (std::size_t cell = 0; cell < 64; ++cell) {
      for (std::size_t side = 0; side < 2; ++side) {
        for (std::size_t kind = 0; kind < 2; ++kind) {
          if (px[cell * 16 + side * 8 + kind * 4] > 0) ++counted[side][kind];
        }
      }
    }
    std::size_t truth[2][2] = {};
    for (const auto& u : s.units) {
      if (u.alive) ++truth[u.team == s.units[0].team ? 0 : 1][u.kind];
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) CHECK(counted[a][b] == truth[a][b]);
    }
    // A melee unit's cell lights only melee channels.
    for (const auto& u : s.units) {
      if (!u.alive || u.kind != kMelee) continue;
      const std::size_t cell = static_cast<std::size_t>(u.row * 8 + u.col);
      for (std::size_t ch = 0; ch < 16; ++ch) {
        if ((ch % 8) / 4 == 0) CHECK(px[cell * 16 + ch] == 0.0);
      }
    }
  }
}

TEST_CASE("dead padding") {
  BattleConfig cfg;
  BattleEnv env(cfg);
  env.reset(2);
  BattleState s;
  s.units = env.state().units;
  for (auto& u : s.units) {
    u.row = 0;
    u.col = 0;
  }
  // Place the ten units on distinct cells; unit 5 sits next to unit 0 with
  // almost no health left.
  for (std::size_t i = 0; i < 10; ++i) {
    s.units[i].row = static_cast<int>(i % 5);
    s.units[i].col = i < 5 ? 0 : 7;
  }
  s.units[5].row = 0;
  s.units[5].col = 1;
  s.units[5].hp = 1.0;
  s.units[5].shield = 0.0;

  auto pad = dead_padding();
  const std::size_t n = 10;
  pad->setup({env.observation_specs(), env.action_specs()});
  const Bundle before_raw = env.load(s);
  const auto before = pad->obs_trans(before_raw, std::vector<double>(n, 0.0)).obs;
  for (const auto& o : before) CHECK(o.at("alive") == Value::vector({1.0}));

  // Only unit 0 has an enemy in range; unit 5 walks north into the wall.
  std::vector<std::int64_t> acts(n, kAttack);
  acts[5] = 0;
  const auto r = env.step(as_bundle(acts));
  CHECK_FALSE(env.state().units[5].alive);
  const auto after = pad->obs_trans(r.obs, r.rewards).obs;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(after[i].at("alive") == Value::vector({i == 5 ? 0.0 : 1.0}));
  }
  for (double x : after[5].at("obs").entries()) CHECK(x == 0.0);
  auto enc = img5i();
  enc->setup({env.observation_specs(), env.action_specs()});
  CHECK(after[0].at("obs") == enc->obs_trans(r.obs, r.rewards).obs[0]);
}

TEST_CASE("hit-and-run agent") {
  const BattleConfig cfg;
  HitAndRunAgent agent;
  agent.setup({observation_spec(cfg)}, {SpaceSpec::discrete(9)});
  BattleEnv env(cfg);
  env.reset(1);
  BattleState s;
  s.units = env.state().units;
  for (std::size_t i = 0; i < 10; ++i) {
    s.units[i].row = static_cast<int>(i % 5) + 2;
    s.units[i].col = i < 5 ? 0 : 7;
  }
  s.units[5].row = 3;
  s.units[5].col = 4;
  s.units[0].row = 3;
  s.units[0].col = 3;
  agent.reset({observe(cfg, s, 0)});
  CHECK(agent.step({observe(cfg, s, 0)}, {0}, false)[0] == Value::discrete(kAttack));

  s.units[0].cd = 2;
  const auto a = agent.step({observe(cfg, s, 0)}, {0}, false)[0].index();
  REQUIRE(a < 8);
  const int r = 3 + kMoves[static_cast<std::size_t>(a)][0], c = 3 + kMoves[static_cast<std::size_t>(a)][1];
  const auto d2 = [](int r1, int c1, int r2, int c2) { return (r1 - r2) * (r1 - r2) + (c1 - c2) * (c1 - c2); };
  CHECK(d2(r, c, 3, 4) > d2(3, 3, 3, 4));
}
