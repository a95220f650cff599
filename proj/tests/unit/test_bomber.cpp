#include <doctest.h>

#include <algorithm>

#include "arena/core/agent.hpp"
#include "arena/core/error.hpp"
#include "arena/envs/bomber.hpp"
#include "arena/interface/wrappers.hpp"
#include "bomber_oracle.hpp"

using namespace arena;
using namespace arena::bomber;

namespace {

Bundle as_bundle(const std::array<Action, kAgents>& a) {
  Bundle b;
  for (auto x : a) b.push_back(Value::discrete(x));
  return b;
}

std::array<Action, kAgents> random_actions(RngStream& rng) {
  std::array<Action, kAgents> a{};
  for (auto& x : a) x = static_cast<Action>(rng.below(kActions));
  return a;
}

// A board without wood, agents placed on the given cells.
BomberState open_board(const BomberConfig& cfg, std::array<std::array<int, 2>, kAgents> cells) {
  RngStream rng(0);
  BomberState s = generate(cfg, rng);
  for (auto& c : s.board) {
    if (c == Cell::Wood) c = Cell::Passage;
  }
  std::fill(s.hidden.begin(), s.hidden.end(), Powerup::None);
  for (std::size_t i = 0; i < kAgents; ++i) {
    s.agents[i].row = cells[i][0];
    s.agents[i].col = cells[i][1];
  }
  return s;
}

bool has_flame(const BomberState& s, int r, int c) { return s.flame[s.at(r, c)] > 0; }

std::vector<BomberState> random_states(const BomberConfig& cfg, std::size_t count, std::uint64_t seed) {
  std::vector<BomberState> out;
  BomberEnv env(cfg);
  RngStream rng(seed);
  while (out.size() < count) {
    env.reset(rng.next_u64());
    const auto len = rng.below(60);
    for (std::size_t t = 0; t < len && !env.done(); ++t) env.step(as_bundle(random_actions(rng)));
    out.push_back(env.state());
  }
  return out;
}

double grid_sum(const Value& g, std::size_t channel) {
  const auto c = g.shape().channels;
  double t = 0;
  for (std::size_t i = channel; i < g.entries().size(); i += c) t += g.entries()[i];
  return t;
}

}  // namespace

TEST_CASE("bomber board generation") {
  const BomberConfig cfg;
  BomberEnv env(cfg);
  CHECK(env.slot_count() == 4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    env.reset(seed);
    const auto& s = env.state();
    const int n = s.size;
    for (const auto& [r, c] : start_cells(n)) {
      CHECK(s.board[s.at(r, c)] == Cell::Passage);
    }
    for (const auto& [r, c] : std::vector<std::array<int, 2>>{{0, 1}, {1, 0}, {0, n - 2}, {1, n - 1}, {n - 1, 1}, {n - 2, 0}, {n - 1, n - 2}, {n - 2, n - 1}}) {
      CHECK(s.board[s.at(r, c)] == Cell::Passage);
    }
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const auto [rr, cc] = rotate_ccw(r, c, n);
        CHECK(s.board[s.at(r, c)] == s.board[s.at(rr, cc)]);
        CHECK(s.hidden[s.at(r, c)] == s.hidden[s.at(rr, cc)]);
        CHECK((s.board[s.at(r, c)] == Cell::Rigid) == (r % 2 == 1 && c % 2 == 1));
      }
    }
  }
  BomberEnv a, b;
  a.reset(5);
  b.reset(5);
  CHECK(a.state().board == b.state().board);
  CHECK(a.state_hash() == b.state_hash());
  CHECK(start_cells(11)[1] == std::array<int, 2>{0, 10});
  CHECK(mode_teams(Mode::Teams) == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}});

  BomberConfig bad;
  bad.size = 4;
  CHECK_THROWS_AS(BomberEnv{bad}, ConfigError);
}

TEST_CASE("bomber blast rays") {
  const BomberConfig cfg;
  const BomberState s = open_board(cfg, {{{10, 10}, {10, 0}, {8, 10}, {10, 8}}});
  const auto cells = blast_cells(s, {0, 1, 0, 5, 2});
  auto has = [&](int r, int c) { return std::find(cells.begin(), cells.end(), s.at(r, c)) != cells.end(); };
  CHECK(has(0, 1));
  CHECK(has(0, 0));
  CHECK(has(0, 3));
  CHECK_FALSE(has(0, 4));
  CHECK_FALSE(has(1, 1));
  CHECK_FALSE(has(2, 1));
  CHECK(cells.size() == 4);

  BomberState w = s;
  w.board[w.at(0, 2)] = Cell::Wood;
  const auto wc = blast_cells(w, {0, 1, 0, 5, 2});
  CHECK(std::find(wc.begin(), wc.end(), w.at(0, 2)) != wc.end());
  CHECK(std::find(wc.begin(), wc.end(), w.at(0, 3)) == wc.end());
}

TEST_CASE("bomber chain explosion") {
  const BomberConfig cfg;
  BomberState s = open_board(cfg, {{{10, 10}, {10, 0}, {8, 10}, {10, 8}}});
  s.bombs = {{0, 2, 0, 1, 2}, {0, 4, 1, 9, 2}};
  s.agents[0].ammo = 0;
  s.agents[1].ammo = 0;
  advance(cfg, s, {Idle, Idle, Idle, Idle});
  CHECK(s.bombs.empty());
  CHECK(has_flame(s, 0, 0));
  CHECK(has_flame(s, 0, 6));
  CHECK_FALSE(has_flame(s, 0, 7));
  CHECK(s.agents[0].ammo == 1);
  CHECK(s.agents[1].ammo == 1);
  // Flames fade after flame_life ticks.
  advance(cfg, s, {Idle, Idle, Idle, Idle});
  CHECK(has_flame(s, 0, 6));
  advance(cfg, s, {Idle, Idle, Idle, Idle});
  CHECK_FALSE(has_flame(s, 0, 6));
}

TEST_CASE("bomber move conflicts") {
  const BomberConfig cfg;
  BomberState s = open_board(cfg, {{{0, 4}, {0, 6}, {10, 10}, {10, 0}}});
  advance(cfg, s, {Right, Left, Idle, Idle});
  CHECK(s.agents[0].col == 4);
  CHECK(s.agents[1].col == 6);

  BomberState swap = open_board(cfg, {{{0, 4}, {0, 5}, {10, 10}, {10, 0}}});
  advance(cfg, swap, {Right, Left, Idle, Idle});
  CHECK(swap.agents[0].col == 4);
  CHECK(swap.agents[1].col == 5);

  // Following into a vacated cell is fine; walking into a stayer is not.
  BomberState follow = open_board(cfg, {{{0, 4}, {0, 5}, {0, 7}, {10, 0}}});
  advance(cfg, follow, {Right, Right, Left, Idle});
  CHECK(follow.agents[0].col == 4);
  CHECK(follow.agents[1].col == 5);
  CHECK(follow.agents[2].col == 7);

  BomberState train = open_board(cfg, {{{0, 4}, {0, 5}, {10, 10}, {10, 0}}});
  advance(cfg, train, {Right, Right, Idle, Idle});
  CHECK(train.agents[0].col == 5);
  CHECK(train.agents[1].col == 6);
}

TEST_CASE("bomber invariants under random play") {
  for (Mode mode : {Mode::FFA, Mode::Teams}) {
    BomberConfig cfg;
    cfg.mode = mode;
    BomberEnv env(cfg);
    RngStream rng(31);
    for (int ep = 0; ep < 40; ++ep) {
      env.reset(rng.next_u64());
      auto conserved = [](const BomberState& s) {
        long total = 0;
        for (const auto& a : s.agents) total += a.ammo;
        total += static_cast<long>(s.bombs.size());
        for (std::size_t i = 0; i < s.board.size(); ++i) {
          total += s.hidden[i] == Powerup::Ammo;
          total += s.exposed[i] == Powerup::Ammo;
        }
        return total;
      };
      const long ammo0 = conserved(env.state());
      std::vector<Cell> rigid0;
      for (auto c : env.state().board) rigid0.push_back(c == Cell::Rigid ? Cell::Rigid : Cell::Passage);
      auto wood = [](const BomberState& s) { return std::count(s.board.begin(), s.board.end(), Cell::Wood); };
      auto last_wood = wood(env.state());
      while (!env.done()) {
        const auto r = env.step(as_bundle(random_actions(rng)));
        const auto& s = env.state();
        CHECK(conserved(s) == ammo0);
        for (std::size_t i = 0; i < s.board.size(); ++i) CHECK((s.board[i] == Cell::Rigid) == (rigid0[i] == Cell::Rigid));
        CHECK(wood(s) <= last_wood);
        last_wood = wood(s);
        if (r.done) {
          double sum = 0;
          for (double x : r.rewards) sum += x;
          if (mode == Mode::Teams) CHECK(sum == 0.0);
        } else {
          CHECK(r.rewards == std::vector<double>(4, 0.0));
        }
      }
      CHECK(env.elapsed() <= 800);
    }
  }
}

TEST_CASE("bomber board map") {
  const BomberConfig cfg;
  auto itf = board_map_obs();
  const std::vector<SpaceSpec> specs(4, observation_spec(cfg));
  itf->setup({specs, std::vector<SpaceSpec>(4, SpaceSpec::discrete(6))});
  for (const auto& s : random_states(cfg, 100, 3)) {
    Bundle raw;
    for (std::size_t i = 0; i < 4; ++i) raw.push_back(observe(cfg, s, i));
    const auto out = itf->obs_trans(raw, std::vector<double>(4, 0.0)).obs;
    for (std::size_t i = 0; i < 4; ++i) {
      const Value& g = out[i].at("board_map");
      CHECK(g.shape() == GridShape{11, 11, 8});
      CHECK(grid_sum(g, 0) == static_cast<double>(std::count(s.board.begin(), s.board.end(), Cell::Rigid)));
      CHECK(grid_sum(g, 1) == static_cast<double>(std::count(s.board.begin(), s.board.end(), Cell::Wood)));
      CHECK(grid_sum(g, 2) == static_cast<double>(s.bombs.size()));
      CHECK(grid_sum(g, 3) == static_cast<double>(std::count_if(s.flame.begin(), s.flame.end(), [](int f) { return f > 0; })));
      CHECK(grid_sum(g, 4) == static_cast<double>(s.exposed.size() - static_cast<std::size_t>(std::count(s.exposed.begin(), s.exposed.end(), Powerup::None))));
      CHECK(grid_sum(g, 5) == (s.agents[i].alive ? 1.0 : 0.0));
      double others = 0;
      for (std::size_t j = 0; j < 4; ++j) others += j != i && s.agents[j].alive;
      CHECK(grid_sum(g, 6) + grid_sum(g, 7) == others);
    }
  }
}

TEST_CASE("bomber attributes") {
  BomberEnv env;
  auto wrapped = wrap_env(std::make_unique<BomberEnv>(), attr_obs());
  Bundle obs = wrapped->reset(4);
  CHECK(obs[0].at("attrs") == Value::vector({0.1, 0.2, 1.0, 0.0}));
  RngStream rng(6);
  double last = 0.0;
  while (!wrapped->done()) {
    const auto r = wrapped->step(as_bundle(random_actions(rng)));
    const double t = r.obs[0].at("attrs").entries()[3];
    CHECK(t > last);
    last = t;
    const auto& st = dynamic_cast<const BomberEnv&>(wrapped->base()).state();
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(r.obs[i].at("attrs").entries()[2] == (st.agents[i].alive ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("bomber action mask") {
  const BomberConfig cfg;
  BomberEnv env(cfg);
  env.reset(9);
  const auto m0 = legal_actions(env.state(), 0);
  CHECK(m0 == std::array<bool, kActions>{true, false, true, false, true, true});

  BomberState s = env.state();
  s.agents[0].ammo = 0;
  CHECK_FALSE(legal_actions(s, 0)[PlaceBomb]);
  s.agents[0].alive = false;
  CHECK(legal_actions(s, 0) == std::array<bool, kActions>{true, false, false, false, false, false});

  auto itf = act_mask_obs();
  itf->setup({std::vector<SpaceSpec>(4, observation_spec(cfg)), std::vector<SpaceSpec>(4, SpaceSpec::discrete(6))});
  for (const auto& st : random_states(cfg, 200, 8)) {
    Bundle raw;
    for (std::size_t i = 0; i < 4; ++i) raw.push_back(observe(cfg, st, i));
    const auto out = itf->obs_trans(raw, std::vector<double>(4, 0.0)).obs;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto oracle = testkit::oracle_mask(cfg, st, i);
      for (std::size_t a = 0; a < kActions; ++a) CHECK(out[i].at("action_mask").entries()[a] == (oracle[a] ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("bomber rotation") {
  for (int k = 0; k < 4; ++k) {
    for (std::size_t a = 0; a < kActions; ++a) {
      const auto act = static_cast<Action>(a);
      CHECK(world_to_view(view_to_world(act, k), k) == act);
      CHECK(view_to_world(world_to_view(act, k), k) == act);
    }
  }
  CHECK(view_to_world(Up, 0) == Up);
  CHECK(view_to_world(Up, 1) == Right);
  CHECK(world_to_view(Up, 1) == Left);
  CHECK(view_to_world(Up, 2) == Down);

  const BomberConfig cfg;
  BomberEnv env(cfg);
  env.reset(12);
  auto rot = rotate_itf();
  const std::vector<SpaceSpec> specs(4, observation_spec(cfg));
  rot->setup({specs, std::vector<SpaceSpec>(4, SpaceSpec::discrete(6))});
  Bundle raw;
  for (std::size_t i = 0; i < 4; ++i) raw.push_back(observe(cfg, env.state(), i));
  const auto view = rot->reset(raw);
  CHECK(view[0] == raw[0]);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& me = view[i].at("agents").items()[i];
    CHECK(me.at("row") == Value::discrete(0));
    CHECK(me.at("col") == Value::discrete(0));
  }

  // Four quarter turns of slot 1's view are the identity.
  std::vector<InterfacePtr> turns;
  for (int t = 0; t < 4; ++t) turns.push_back(rotate_itf());
  auto full = pipeline(std::move(turns));
  full->setup({specs, std::vector<SpaceSpec>(4, SpaceSpec::discrete(6))});
  for (const auto& st : random_states(cfg, 20, 13)) {
    Bundle b;
    for (std::size_t i = 0; i < 4; ++i) b.push_back(observe(cfg, st, i));
    CHECK(full->obs_trans(b, std::vector<double>(4, 0.0)).obs == b);
    CHECK(full->act_trans(as_bundle({Up, Left, Down, Right})) == as_bundle({Up, Left, Down, Right}));
  }

  // Masking in the view equals permuting the world mask.
  std::vector<InterfacePtr> a, b;
  a.push_back(act_mask_obs());
  a.push_back(rotate_itf());
  b.push_back(rotate_itf());
  b.push_back(act_mask_obs());
  auto mask_then_rotate = pipeline(std::move(a));
  auto rotate_then_mask = pipeline(std::move(b));
  mask_then_rotate->setup({specs, std::vector<SpaceSpec>(4, SpaceSpec::discrete(6))});
  rotate_then_mask->setup({specs, std::vector<SpaceSpec>(4, SpaceSpec::discrete(6))});
  for (const auto& st : random_states(cfg, 100, 14)) {
    Bundle obs;
    for (std::size_t i = 0; i < 4; ++i) obs.push_back(observe(cfg, st, i));
    const auto x = mask_then_rotate->obs_trans(obs, std::vector<double>(4, 0.0)).obs;
    const auto y = rotate_then_mask->obs_trans(obs, std::vector<double>(4, 0.0)).obs;
    for (std::size_t i = 0; i < 4; ++i) CHECK(x[i].at("action_mask") == y[i].at("action_mask"));
  }
}

TEST_CASE("bomber rewards and outcome") {
  BomberConfig cfg;
  BomberEnv env(cfg);
  env.reset(1);
  BomberState s = open_board(cfg, {{{0, 0}, {10, 10}, {10, 0}, {0, 10}}});
  s.agents[1].alive = false;
  s.agents[2].alive = false;
  s.agents[3].alive = false;
  env.load(s);
  const auto r = env.step(as_bundle({Idle, Idle, Idle, Idle}));
  CHECK(r.done);
  CHECK(r.rewards == std::vector<double>{1, -1, -1, -1});
}

TEST_CASE("simple agent safety") {
  const BomberConfig cfg;
  SimpleAgent agent(cfg.bomb_life);
  agent.setup({observation_spec(cfg)}, {SpaceSpec::discrete(6)});

  // On a bomb that leaves just enough time to get around a corner: step off
  // at once and survive the blast.
  for (int fuse : {4, cfg.bomb_life}) {
    BomberState s = open_board(cfg, {{{2, 4}, {10, 10}, {10, 0}, {8, 10}}});
    s.bombs = {{2, 4, 0, fuse, 2}};
    s.agents[0].ammo = 0;
    agent.reset({observe(cfg, s, 0)});
    const auto first = static_cast<Action>(agent.step({observe(cfg, s, 0)}, {0}, false)[0].index());
    CHECK(first != Idle);
    CHECK(first != PlaceBomb);
    advance(cfg, s, {first, Idle, Idle, Idle});
    for (int t = 1; t < fuse + cfg.flame_life + 1; ++t) {
      const auto a = static_cast<Action>(agent.step({observe(cfg, s, 0)}, {0}, false)[0].index());
      advance(cfg, s, {a, Idle, Idle, Idle});
    }
    CHECK(s.bombs.empty());
    CHECK(s.agents[0].alive);
  }

  // Nothing to fight and nothing to blow up: never places a bomb.
  BomberState calm = open_board(cfg, {{{4, 4}, {10, 10}, {10, 0}, {0, 10}}});
  for (std::size_t j = 1; j < kAgents; ++j) calm.agents[j].alive = false;
  agent.reset({observe(cfg, calm, 0)});
  for (int t = 0; t < 30; ++t) {
    const auto act = static_cast<Action>(agent.step({observe(cfg, calm, 0)}, {0}, false)[0].index());
    CHECK(act != PlaceBomb);
    advance(cfg, calm, {act, Idle, Idle, Idle});
    CHECK(calm.agents[0].alive);
  }
}

TEST_CASE("simple agents rarely kill themselves") {
  BomberConfig cfg;
  BomberEnv env(cfg);
  std::vector<std::unique_ptr<SimpleAgent>> agents;
  for (std::size_t i = 0; i < kAgents; ++i) {
    agents.push_back(std::make_unique<SimpleAgent>(cfg.bomb_life));
    agents.back()->setup({observation_spec(cfg)}, {SpaceSpec::discrete(6)});
  }
  int survivors = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Bundle obs = env.reset(seed);
    for (std::size_t i = 0; i < kAgents; ++i) agents[i]->reset({obs[i]});
    for (int t = 0; t < 200 && !env.done(); ++t) {
      Bundle acts;
      for (std::size_t i = 0; i < kAgents; ++i) acts.push_back(agents[i]->step({obs[i]}, {0}, false)[0]);
      obs = env.step(acts).obs;
    }
    for (const auto& a : env.state().agents) {
      survivors += a.alive;
      ++total;
    }
  }
  // Four careful players on a mostly wooden board mostly stay alive early on.
  CHECK(survivors * 2 >= total);
}
