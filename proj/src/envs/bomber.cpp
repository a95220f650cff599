#include "arena/envs/bomber.hpp"

#include <algorithm>
#include <sstream>

#include "arena/core/error.hpp"
#include "arena/envs/outcome.hpp"

namespace arena::bomber {

void BomberConfig::validate() const {
  if (size < 5 || size % 2 == 0) throw ConfigError("bomber: board size must be odd and at least 5");
  if (step_limit == 0) throw ConfigError("bomber: step_limit must be positive");
  if (bomb_life <= 0 || flame_life <= 0) throw ConfigError("bomber: bomb_life and flame_life must be positive");
  if (initial_ammo < 0 || initial_blast <= 0) throw ConfigError("bomber: invalid initial ammo or blast");
  if (wood_density < 0.0 || wood_density > 1.0) throw ConfigError("bomber: wood_density must be in [0, 1]");
  if (powerup_prob < 0.0 || powerup_prob > 1.0) throw ConfigError("bomber: powerup_prob must be in [0, 1]");
}

bool BomberState::has_bomb(int r, int c) const {
  return std::any_of(bombs.begin(), bombs.end(), [&](const Bomb& b) { return b.row == r && b.col == c; });
}

std::array<std::array<int, 2>, kAgents> start_cells(int size) {
  const int e = size - 1;
  return {{{0, 0}, {0, e}, {e, e}, {e, 0}}};
}

std::vector<std::vector<std::size_t>> mode_teams(Mode mode) {
  if (mode == Mode::Teams) return {{0, 2}, {1, 3}};
  return {{0}, {1}, {2}, {3}};
}

std::array<int, 2> rotate_ccw(int r, int c, int n) { return {n - 1 - c, r}; }

BomberState generate(const BomberConfig& cfg, RngStream& rng) {
  const int n = cfg.size;
  BomberState s;
  s.size = n;
  const auto cells = static_cast<std::size_t>(n * n);
  s.board.assign(cells, Cell::Passage);
  s.hidden.assign(cells, Powerup::None);
  s.exposed.assign(cells, Powerup::None);
  s.flame.assign(cells, 0);

  std::vector<bool> pocket(cells, false);
  for (const auto& [r, c] : start_cells(n)) {
    pocket[s.at(r, c)] = true;
    // The two neighbours along the board edges.
    pocket[s.at(r, c == 0 ? 1 : c - 1)] = true;
    pocket[s.at(r == 0 ? 1 : r - 1, c)] = true;
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (r % 2 == 1 && c % 2 == 1) s.board[s.at(r, c)] = Cell::Rigid;
    }
  }
  // Wood is drawn once per rotation orbit, at the orbit's first cell in
  // row-major order, and copied to the rest of the orbit.
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::array<std::array<int, 2>, 4> orbit{};
      orbit[0] = {r, c};
      for (std::size_t k = 1; k < 4; ++k) orbit[k] = rotate_ccw(orbit[k - 1][0], orbit[k - 1][1], n);
      const bool first = std::all_of(orbit.begin(), orbit.end(),
                                     [&](const auto& p) { return s.at(r, c) <= s.at(p[0], p[1]); });
      if (!first || s.board[s.at(r, c)] == Cell::Rigid || pocket[s.at(r, c)]) continue;
      if (!rng.bernoulli(cfg.wood_density)) continue;
      Powerup p = Powerup::None;
      if (rng.bernoulli(cfg.powerup_prob)) p = rng.bernoulli(0.5) ? Powerup::Ammo : Powerup::Blast;
      for (const auto& q : orbit) {
        s.board[s.at(q[0], q[1])] = Cell::Wood;
        s.hidden[s.at(q[0], q[1])] = p;
      }
    }
  }
  const auto starts = start_cells(n);
  for (std::size_t i = 0; i < kAgents; ++i) {
    s.agents[i] = {starts[i][0], starts[i][1], cfg.initial_ammo, cfg.initial_blast, true};
  }
  return s;
}

std::vector<std::size_t> blast_cells(const BomberState& s, const Bomb& b) {
  std::vector<std::size_t> out{s.at(b.row, b.col)};
  for (std::size_t d = 1; d <= 4; ++d) {
    for (int k = 1; k <= b.blast; ++k) {
      const int r = b.row + kDelta[d][0] * k, c = b.col + kDelta[d][1] * k;
      if (!s.on_board(r, c)) break;
      const Cell cell = s.board[s.at(r, c)];
      if (cell == Cell::Rigid) break;
      out.push_back(s.at(r, c));
      if (cell == Cell::Wood) break;
    }
  }
  return out;
}

void advance(const BomberConfig& cfg, BomberState& s, const std::array<Action, kAgents>& actions) {
  // 1. Flames fade, fuses burn, bombs go off. Rays are traced on the board as
  // it stood at the start of the tick; wood is removed afterwards.
  for (auto& f : s.flame) f = std::max(0, f - 1);
  for (auto& b : s.bombs) --b.fuse;
  std::vector<bool> exploded(s.bombs.size(), false);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < s.bombs.size(); ++i) {
    if (s.bombs[i].fuse <= 0) queue.push_back(i);
  }
  std::vector<bool> flamed(s.board.size(), false);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::size_t i = queue[q];
    if (exploded[i]) continue;
    exploded[i] = true;
    ++s.agents[s.bombs[i].owner].ammo;
    for (auto cell : blast_cells(s, s.bombs[i])) {
      flamed[cell] = true;
      for (std::size_t j = 0; j < s.bombs.size(); ++j) {
        if (!exploded[j] && s.at(s.bombs[j].row, s.bombs[j].col) == cell) queue.push_back(j);
      }
    }
  }
  std::vector<Bomb> remaining;
  for (std::size_t i = 0; i < s.bombs.size(); ++i) {
    if (!exploded[i]) remaining.push_back(s.bombs[i]);
  }
  s.bombs = std::move(remaining);
  for (std::size_t cell = 0; cell < flamed.size(); ++cell) {
    if (!flamed[cell]) continue;
    s.flame[cell] = cfg.flame_life;
    if (s.board[cell] == Cell::Wood) {
      s.board[cell] = Cell::Passage;
      s.exposed[cell] = s.hidden[cell];
      s.hidden[cell] = Powerup::None;
    }
  }

  // 2. Flames kill.
  for (auto& a : s.agents) {
    if (a.alive && s.flame[s.at(a.row, a.col)] > 0) a.alive = false;
  }

  // 3. Simultaneous moves. Conflicting moves revert until nothing changes.
  std::array<std::array<int, 2>, kAgents> target{};
  std::array<bool, kAgents> moving{};
  for (std::size_t i = 0; i < kAgents; ++i) {
    const auto& a = s.agents[i];
    target[i] = {a.row, a.col};
    if (!a.alive) continue;
    const auto& d = kDelta[static_cast<std::size_t>(actions[i])];
    if (d[0] == 0 && d[1] == 0) continue;
    const int r = a.row + d[0], c = a.col + d[1];
    if (!s.on_board(r, c) || s.board[s.at(r, c)] != Cell::Passage || s.has_bomb(r, c)) continue;
    target[i] = {r, c};
    moving[i] = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < kAgents; ++i) {
      if (!moving[i]) continue;
      for (std::size_t j = 0; j < kAgents; ++j) {
        if (j == i || !s.agents[j].alive) continue;
        const std::array<int, 2> pos_j{s.agents[j].row, s.agents[j].col};
        const std::array<int, 2> pos_i{s.agents[i].row, s.agents[i].col};
        const bool same_target = moving[j] && target[j] == target[i];
        const bool into_stayer = !moving[j] && target[i] == pos_j;
        const bool swap = moving[j] && target[i] == pos_j && target[j] == pos_i;
        if (same_target || into_stayer || swap) {
          moving[i] = false;
          target[i] = pos_i;
          if (same_target || swap) {
            moving[j] = false;
            target[j] = pos_j;
          }
          changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < kAgents; ++i) {
    s.agents[i].row = target[i][0];
    s.agents[i].col = target[i][1];
  }

  // 4. Bombs are placed where the agent now stands.
  for (std::size_t i = 0; i < kAgents; ++i) {
    auto& a = s.agents[i];
    if (!a.alive || actions[i] != PlaceBomb || a.ammo <= 0 || s.has_bomb(a.row, a.col)) continue;
    s.bombs.push_back({a.row, a.col, i, cfg.bomb_life, a.blast});
    --a.ammo;
  }

  // 5. Power-ups.
  for (auto& a : s.agents) {
    if (!a.alive) continue;
    Powerup& p = s.exposed[s.at(a.row, a.col)];
    if (p == Powerup::Ammo) ++a.ammo;
    if (p == Powerup::Blast) ++a.blast;
    p = Powerup::None;
  }
  ++s.tick;
}

std::array<bool, kActions> legal_actions(const BomberState& s, std::size_t slot) {
  std::array<bool, kActions> m{};
  m[Idle] = true;
  const auto& a = s.agents.at(slot);
  if (!a.alive) return m;
  for (std::size_t d = Up; d <= Right; ++d) {
    const int r = a.row + kDelta[d][0], c = a.col + kDelta[d][1];
    m[d] = s.on_board(r, c) && s.board[s.at(r, c)] == Cell::Passage && !s.has_bomb(r, c);
  }
  m[PlaceBomb] = a.ammo > 0 && !s.has_bomb(a.row, a.col);
  return m;
}

SpaceSpec observation_spec(const BomberConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.size);
  const double cells = static_cast<double>(n * n);
  std::vector<SpaceSpec> agents(kAgents, SpaceSpec::mapping({
                                             {"alive", SpaceSpec::discrete(2)},
                                             {"ammo", SpaceSpec::vector(1, 0.0, cfg.initial_ammo + cells)},
                                             {"blast", SpaceSpec::vector(1, 0.0, cfg.initial_blast + cells)},
                                             {"col", SpaceSpec::discrete(cfg.size)},
                                             {"row", SpaceSpec::discrete(cfg.size)},
                                         }));
  return SpaceSpec::mapping({
      {"agents", SpaceSpec::seq(std::move(agents))},
      {"board", SpaceSpec::grid({n, n, 3}, 0.0, 1.0)},
      {"bombs", SpaceSpec::grid({n, n, 2}, 0.0, std::max<double>(cfg.bomb_life, cfg.initial_blast + cells))},
      {"flames", SpaceSpec::grid({n, n, 1}, 0.0, cfg.flame_life)},
      {"mode", SpaceSpec::constant(cfg.mode == Mode::Teams ? 1.0 : 0.0)},
      {"powerups", SpaceSpec::grid({n, n, 2}, 0.0, 1.0)},
      {"self", SpaceSpec::discrete(kAgents)},
      {"tick", SpaceSpec::vector(1, 0.0, static_cast<double>(cfg.step_limit))},
  });
}

namespace {

// Everything in the observation except "self".
Value shared_fields(const BomberConfig& cfg, const BomberState& s) {
  const auto n = static_cast<std::size_t>(s.size);
  std::vector<double> board(n * n * 3, 0.0), powerups(n * n * 2, 0.0), bombs(n * n * 2, 0.0), flames(n * n, 0.0);
  for (std::size_t i = 0; i < n * n; ++i) {
    board[i * 3 + static_cast<std::size_t>(s.board[i])] = 1.0;
    if (s.exposed[i] != Powerup::None) powerups[i * 2 + static_cast<std::size_t>(s.exposed[i]) - 1] = 1.0;
    flames[i] = s.flame[i];
  }
  for (const auto& b : s.bombs) {
    bombs[s.at(b.row, b.col) * 2] = b.fuse;
    bombs[s.at(b.row, b.col) * 2 + 1] = b.blast;
  }
  std::vector<Value> agents;
  for (const auto& a : s.agents) {
    agents.push_back(Value::mapping({
        {"alive", Value::discrete(a.alive ? 1 : 0)},
        {"ammo", Value::scalar(a.ammo)},
        {"blast", Value::scalar(a.blast)},
        {"col", Value::discrete(a.col)},
        {"row", Value::discrete(a.row)},
    }));
  }
  return Value::mapping({
      {"agents", Value::seq(std::move(agents))},
      {"board", Value::grid({n, n, 3}, std::move(board))},
      {"bombs", Value::grid({n, n, 2}, std::move(bombs))},
      {"flames", Value::grid({n, n, 1}, std::move(flames))},
      {"mode", Value::scalar(cfg.mode == Mode::Teams ? 1.0 : 0.0)},
      {"powerups", Value::grid({n, n, 2}, std::move(powerups))},
      {"tick", Value::scalar(static_cast<double>(s.tick))},
  });
}

bool is_raw_bomber_spec(const SpaceSpec& s) {
  if (!s.is_mapping()) return false;
  for (const char* key : {"agents", "board", "bombs", "flames", "mode", "powerups", "self", "tick"}) {
    if (!s.find(key)) return false;
  }
  return s.at("board").is_grid() && s.at("agents").is_seq() && s.at("agents").items().size() == kAgents;
}

// The parts of the state visible in an observation: board, bombs (owner
// unknown), exposed power-ups, flames and agents.
BomberState from_obs(const Value& obs) {
  BomberState s;
  const GridShape g = obs.at("board").shape();
  s.size = static_cast<int>(g.height);
  const std::size_t cells = g.height * g.width;
  const auto& board = obs.at("board").entries();
  const auto& pu = obs.at("powerups").entries();
  const auto& bombs = obs.at("bombs").entries();
  const auto& flames = obs.at("flames").entries();
  s.board.assign(cells, Cell::Passage);
  s.hidden.assign(cells, Powerup::None);
  s.exposed.assign(cells, Powerup::None);
  s.flame.assign(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) {
    if (board[i * 3 + 1] > 0.5) s.board[i] = Cell::Rigid;
    if (board[i * 3 + 2] > 0.5) s.board[i] = Cell::Wood;
    if (pu[i * 2] > 0.5) s.exposed[i] = Powerup::Ammo;
    if (pu[i * 2 + 1] > 0.5) s.exposed[i] = Powerup::Blast;
    s.flame[i] = static_cast<int>(flames[i]);
    if (bombs[i * 2] > 0.0) {
      const int r = static_cast<int>(i / g.width), c = static_cast<int>(i % g.width);
      s.bombs.push_back({r, c, 0, static_cast<int>(bombs[i * 2]), static_cast<int>(bombs[i * 2 + 1])});
    }
  }
  const auto& agents = obs.at("agents").items();
  for (std::size_t i = 0; i < kAgents; ++i) {
    const auto& a = agents[i];
    s.agents[i] = {static_cast<int>(a.at("row").index()), static_cast<int>(a.at("col").index()),
                   static_cast<int>(a.at("ammo").scalar()), static_cast<int>(a.at("blast").scalar()),
                   a.at("alive").index() != 0};
  }
  s.tick = static_cast<std::size_t>(obs.at("tick").scalar());
  return s;
}

bool teammates(bool teams_mode, std::size_t a, std::size_t b) { return teams_mode && a % 2 == b % 2; }

}  // namespace

Value observe(const BomberConfig& cfg, const BomberState& s, std::size_t self) {
  return shared_fields(cfg, s).with("self", Value::discrete(static_cast<std::int64_t>(self)));
}

BomberEnv::BomberEnv(BomberConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  obs_specs_.assign(kAgents, observation_spec(cfg_));
  act_specs_.assign(kAgents, SpaceSpec::discrete(kActions));
  RngStream rng(0);
  s_ = generate(cfg_, rng);
}

Bundle BomberEnv::observations() const {
  const Value shared = shared_fields(cfg_, s_);
  Bundle out;
  for (std::size_t i = 0; i < kAgents; ++i) out.push_back(shared.with("self", Value::discrete(static_cast<std::int64_t>(i))));
  return out;
}

Bundle BomberEnv::do_reset(std::uint64_t seed) {
  RngStream rng(seed, {"bomber", "board"});
  s_ = generate(cfg_, rng);
  last_.fill(Idle);
  return observations();
}

Bundle BomberEnv::load(BomberState s) {
  if (!started() || done()) throw EpisodeOver("bomber: load needs a live episode");
  if (s.size != cfg_.size || s.board.size() != static_cast<std::size_t>(s.size * s.size)) {
    throw ConfigError("bomber: loaded state has the wrong board size");
  }
  s_ = std::move(s);
  return observations();
}

StepResult BomberEnv::do_step(const Bundle& actions) {
  for (std::size_t i = 0; i < kAgents; ++i) last_[i] = static_cast<Action>(actions[i].index());
  advance(cfg_, s_, last_);

  StepResult r;
  r.rewards.assign(kAgents, 0.0);
  for (const auto& a : s_.agents) r.alive.push_back(a.alive);
  const auto groups = teams();
  std::vector<std::size_t> living_groups;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::any_of(groups[g].begin(), groups[g].end(), [&](std::size_t i) { return s_.agents[i].alive; })) {
      living_groups.push_back(g);
    }
  }
  const bool timeout = s_.tick >= cfg_.step_limit;
  r.done = living_groups.size() <= 1 || timeout;
  if (r.done) {
    std::optional<std::size_t> winner;
    if (living_groups.size() == 1) winner = living_groups[0];
    if (cfg_.mode == Mode::FFA) {
      for (std::size_t i = 0; i < kAgents; ++i) {
        if (!s_.agents[i].alive) r.rewards[i] = -1.0;
        else if (winner) r.rewards[i] = 1.0;
      }
    } else if (winner) {
      for (std::size_t i = 0; i < kAgents; ++i) r.rewards[i] = i % 2 == *winner ? 1.0 : -1.0;
    }
    r.info = terminal_info(groups, winner);
  }
  r.obs = observations();
  return r;
}

void BomberEnv::write_state(StateHasher& h) const {
  h.str("bomber");
  h.u64(s_.tick);
  for (std::size_t i = 0; i < s_.board.size(); ++i) {
    h.u8(static_cast<std::uint8_t>(s_.board[i]));
    h.u8(static_cast<std::uint8_t>(s_.hidden[i]));
    h.u8(static_cast<std::uint8_t>(s_.exposed[i]));
    h.i64(s_.flame[i]);
  }
  h.u64(s_.bombs.size());
  for (const auto& b : s_.bombs) {
    h.i64(b.row);
    h.i64(b.col);
    h.u64(b.owner);
    h.i64(b.fuse);
    h.i64(b.blast);
  }
  for (const auto& a : s_.agents) {
    h.i64(a.row);
    h.i64(a.col);
    h.i64(a.ammo);
    h.i64(a.blast);
    h.boolean(a.alive);
  }
  for (auto a : last_) h.i64(a);
}

std::string BomberEnv::render() const {
  const int n = s_.size;
  std::vector<std::string> rows(static_cast<std::size_t>(n), std::string(static_cast<std::size_t>(n), '.'));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto i = s_.at(r, c);
      char& ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (s_.board[i] == Cell::Rigid) ch = '#';
      else if (s_.board[i] == Cell::Wood) ch = '+';
      else if (s_.flame[i] > 0) ch = '*';
      else if (s_.exposed[i] == Powerup::Ammo) ch = 'a';
      else if (s_.exposed[i] == Powerup::Blast) ch = 'r';
    }
  }
  for (const auto& b : s_.bombs) rows[static_cast<std::size_t>(b.row)][static_cast<std::size_t>(b.col)] = 'o';
  for (std::size_t i = 0; i < kAgents; ++i) {
    const auto& a = s_.agents[i];
    if (a.alive) rows[static_cast<std::size_t>(a.row)][static_cast<std::size_t>(a.col)] = static_cast<char>('0' + i);
  }
  std::ostringstream os;
  os << "tick " << s_.tick << "\n";
  for (const auto& r : rows) os << r << "\n";
  return os.str();
}

// Interfaces ---------------------------------------------------------------

namespace {

class Appender : public SlotwiseInterface {
 public:
  explicit Appender(std::string name, std::string key) : name_(std::move(name)), key_(std::move(key)) {}
  std::string name() const override { return name_; }

 protected:
  virtual SpaceSpec feature_spec(const SpaceSpec& inner) = 0;
  virtual Value feature(const Value& obs) = 0;

  SpaceSpec outer_obs_spec(std::size_t slot, const SpaceSpec& inner) override {
    if (!is_raw_bomber_spec(inner)) {
      throw SetupError(name_ + ": slot " + std::to_string(slot) + " is not a bomber observation");
    }
    if (inner.find(key_)) throw SetupError(name_ + ": observation already has '" + key_ + "'");
    return inner.with(key_, feature_spec(inner));
  }
  Value obs(std::size_t, const Value& v) override { return v.with(key_, feature(v)); }

 private:
  std::string name_;
  std::string key_;
};

class BoardMap final : public Appender {
 public:
  BoardMap() : Appender("bomber.board_map", "board_map") {}

 protected:
  SpaceSpec feature_spec(const SpaceSpec& inner) override {
    const GridShape g = inner.at("board").grid_shape();
    return SpaceSpec::grid({g.height, g.width, 8}, 0.0, 1.0);
  }

  Value feature(const Value& obs) override {
    const BomberState s = from_obs(obs);
    const auto self = static_cast<std::size_t>(obs.at("self").index());
    const bool teams_mode = obs.at("mode").scalar() > 0.5;
    const auto cells = s.board.size();
    std::vector<double> px(cells * 8, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      if (s.board[i] == Cell::Rigid) px[i * 8 + 0] = 1.0;
      if (s.board[i] == Cell::Wood) px[i * 8 + 1] = 1.0;
      if (s.flame[i] > 0) px[i * 8 + 3] = 1.0;
      if (s.exposed[i] != Powerup::None) px[i * 8 + 4] = 1.0;
    }
    for (const auto& b : s.bombs) px[s.at(b.row, b.col) * 8 + 2] = 1.0;
    for (std::size_t j = 0; j < kAgents; ++j) {
      const auto& a = s.agents[j];
      if (!a.alive) continue;
      const std::size_t ch = j == self ? 5 : teammates(teams_mode, j, self) ? 6 : 7;
      px[s.at(a.row, a.col) * 8 + ch] = 1.0;
    }
    const auto n = static_cast<std::size_t>(s.size);
    return Value::grid({n, n, 8}, std::move(px));
  }
};

class Attr final : public Appender {
 public:
  Attr() : Appender("bomber.attr", "attrs") {}

 protected:
  SpaceSpec feature_spec(const SpaceSpec& inner) override {
    limit_ = inner.at("tick").high();
    return SpaceSpec::vector(4, 0.0, 1.0);
  }

  Value feature(const Value& obs) override {
    constexpr double kCap = 10.0;
    const auto self = static_cast<std::size_t>(obs.at("self").index());
    const auto& a = obs.at("agents").items().at(self);
    return Value::vector({
        std::min(a.at("ammo").scalar(), kCap) / kCap,
        std::min(a.at("blast").scalar(), kCap) / kCap,
        a.at("alive").index() != 0 ? 1.0 : 0.0,
        limit_ > 0.0 ? obs.at("tick").scalar() / limit_ : 0.0,
    });
  }

 private:
  double limit_ = 1.0;
};

class ActMask final : public Appender {
 public:
  ActMask() : Appender("bomber.act_mask", "action_mask") {}

 protected:
  SpaceSpec feature_spec(const SpaceSpec&) override { return SpaceSpec::vector(kActions, 0.0, 1.0); }

  Value feature(const Value& obs) override {
    const auto m = legal_actions(from_obs(obs), static_cast<std::size_t>(obs.at("self").index()));
    std::vector<double> v;
    for (bool b : m) v.push_back(b ? 1.0 : 0.0);
    return Value::vector(std::move(v));
  }
};

Value rotate_grid(const Value& g) {
  const GridShape s = g.shape();
  const auto n = s.height;
  const auto& in = g.entries();
  std::vector<double> out(in.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto src = (c * n + (n - 1 - r)) * s.channels;
      std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(src), s.channels,
                  out.begin() + static_cast<std::ptrdiff_t>((r * n + c) * s.channels));
    }
  }
  return Value::grid(s, std::move(out));
}

class Rotate final : public SlotwiseInterface {
 public:
  std::string name() const override { return "bomber.rotate"; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t slot, const SpaceSpec& inner) override {
    if (!is_raw_bomber_spec(inner)) {
      throw SetupError("bomber.rotate: slot " + std::to_string(slot) + " is not a bomber observation");
    }
    for (const auto& [key, s] : inner.fields()) {
      if (s.is_grid() && s.grid_shape().height != s.grid_shape().width) {
        throw SetupError("bomber.rotate: grid '" + key + "' is not square");
      }
    }
    if (turns_.size() <= slot) turns_.resize(slot + 1, 0);
    return inner;
  }

  Value obs(std::size_t slot, const Value& v) override {
    const int k = static_cast<int>(v.at("self").index() % static_cast<std::int64_t>(kAgents));
    turns_[slot] = k;
    if (k == 0) return v;
    const auto n = static_cast<int>(v.at("board").shape().height);
    std::vector<Value::Field> out;
    for (const auto& [key, x] : v.fields()) {
      if (x.is_grid()) {
        Value g = x;
        for (int t = 0; t < k; ++t) g = rotate_grid(g);
        out.emplace_back(key, g);
      } else if (key == "agents") {
        std::vector<Value> agents;
        for (const auto& a : x.items()) {
          std::array<int, 2> p{static_cast<int>(a.at("row").index()), static_cast<int>(a.at("col").index())};
          for (int t = 0; t < k; ++t) p = rotate_ccw(p[0], p[1], n);
          agents.push_back(a.with("row", Value::discrete(p[0])).with("col", Value::discrete(p[1])));
        }
        out.emplace_back(key, Value::seq(std::move(agents)));
      } else if (key == "action_mask") {
        const auto& m = x.entries();
        std::vector<double> view(kActions);
        for (std::size_t a = 0; a < kActions; ++a) view[a] = m[static_cast<std::size_t>(view_to_world(static_cast<Action>(a), k))];
        out.emplace_back(key, Value::vector(std::move(view)));
      } else {
        out.emplace_back(key, x);
      }
    }
    return Value::mapping(std::move(out));
  }

  Value act(std::size_t slot, const Value& a) override {
    return Value::discrete(view_to_world(static_cast<Action>(a.index()), turns_[slot]));
  }

 private:
  std::vector<int> turns_;
};

}  // namespace

InterfacePtr board_map_obs() { return std::make_unique<BoardMap>(); }
InterfacePtr attr_obs() { return std::make_unique<Attr>(); }
InterfacePtr act_mask_obs() { return std::make_unique<ActMask>(); }
InterfacePtr rotate_itf() { return std::make_unique<Rotate>(); }

namespace {

// A world direction seen in a view turned a quarter counter-clockwise.
Action turn_view(Action a) {
  switch (a) {
    case Up: return Left;
    case Left: return Down;
    case Down: return Right;
    case Right: return Up;
    default: return a;
  }
}

Action turn_world(Action a) {
  switch (a) {
    case Left: return Up;
    case Down: return Left;
    case Right: return Down;
    case Up: return Right;
    default: return a;
  }
}

}  // namespace

Action view_to_world(Action a, int k) {
  for (int t = 0; t < ((k % 4) + 4) % 4; ++t) a = turn_world(a);
  return a;
}

Action world_to_view(Action a, int k) {
  for (int t = 0; t < ((k % 4) + 4) % 4; ++t) a = turn_view(a);
  return a;
}

// Simple agent -------------------------------------------------------------

namespace {

// danger[t] holds the cells where standing at the start of future tick t is
// fatal, for t = 1..horizon.
struct DangerMap {
  std::vector<std::vector<bool>> at;  // [t][cell]
  int horizon = 0;

  bool any_from(std::size_t cell, int t0) const {
    for (int t = std::max(t0, 1); t <= horizon; ++t) {
      if (at[static_cast<std::size_t>(t)][cell]) return true;
    }
    return false;
  }
};

DangerMap danger_map(const BomberState& s, int flame_life) {
  const auto nb = s.bombs.size();
  std::vector<int> when(nb);
  std::vector<std::vector<std::size_t>> reach(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    when[i] = std::max(1, s.bombs[i].fuse);
    reach[i] = blast_cells(s, s.bombs[i]);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        if (i == j || when[i] >= when[j]) continue;
        const auto cj = s.at(s.bombs[j].row, s.bombs[j].col);
        if (std::find(reach[i].begin(), reach[i].end(), cj) != reach[i].end()) {
          when[j] = when[i];
          changed = true;
        }
      }
    }
  }
  DangerMap d;
  d.horizon = flame_life + 1;
  for (int w : when) d.horizon = std::max(d.horizon, w + flame_life);
  for (int f : s.flame) d.horizon = std::max(d.horizon, f);
  d.at.assign(static_cast<std::size_t>(d.horizon) + 1, std::vector<bool>(s.board.size(), false));
  for (std::size_t cell = 0; cell < s.flame.size(); ++cell) {
    for (int t = 1; t < s.flame[cell]; ++t) d.at[static_cast<std::size_t>(t)][cell] = true;
  }
  for (std::size_t i = 0; i < nb; ++i) {
    for (int t = when[i]; t < when[i] + flame_life; ++t) {
      for (auto cell : reach[i]) d.at[static_cast<std::size_t>(t)][cell] = true;
    }
  }
  return d;
}

bool passable(const BomberState& s, int r, int c) {
  return s.on_board(r, c) && s.board[s.at(r, c)] == Cell::Passage && !s.has_bomb(r, c);
}

// First action of the shortest survivable route, starting at tick t0 from
// the agent's cell, to a cell that stays safe for the rest of the horizon.
std::optional<Action> escape(const BomberState& s, std::size_t self, const DangerMap& d, int t0) {
  const auto& me = s.agents[self];
  const auto cells = s.board.size();
  std::vector<bool> blocked(cells, false);
  for (std::size_t j = 0; j < kAgents; ++j) {
    if (j != self && s.agents[j].alive) blocked[s.at(s.agents[j].row, s.agents[j].col)] = true;
  }
  struct Node {
    int r, c, t;
    Action first;
  };
  std::vector<std::vector<bool>> seen(static_cast<std::size_t>(d.horizon) + 2, std::vector<bool>(cells, false));
  std::vector<Node> queue{{me.row, me.col, t0, Idle}};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const Node cur = queue[q];
    const auto cell = s.at(cur.r, cur.c);
    if (cur.t + 1 <= d.horizon && d.at[static_cast<std::size_t>(cur.t + 1)][cell]) continue;
    if (!d.any_from(cell, cur.t + 1)) return cur.first;
    if (cur.t >= d.horizon) continue;
    for (std::size_t a = Idle; a <= Right; ++a) {
      const int r = cur.r + kDelta[a][0], c = cur.c + kDelta[a][1];
      if (a != Idle && (!passable(s, r, c) || blocked[s.at(r, c)])) continue;
      auto mark = seen[static_cast<std::size_t>(cur.t + 1)][s.at(r, c)];
      if (mark) continue;
      mark = true;
      queue.push_back({r, c, cur.t + 1, q == 0 ? static_cast<Action>(a) : cur.first});
    }
  }
  return std::nullopt;
}

// Breadth-first distances over passable cells from every source cell.
std::vector<int> distances(const BomberState& s, const std::vector<std::size_t>& sources) {
  std::vector<int> dist(s.board.size(), -1);
  std::vector<std::size_t> queue;
  for (auto c : sources) {
    if (dist[c] < 0) {
      dist[c] = 0;
      queue.push_back(c);
    }
  }
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int r = static_cast<int>(queue[q]) / s.size, c = static_cast<int>(queue[q]) % s.size;
    for (std::size_t a = Up; a <= Right; ++a) {
      const int nr = r + kDelta[a][0], nc = c + kDelta[a][1];
      if (!passable(s, nr, nc) || dist[s.at(nr, nc)] >= 0) continue;
      dist[s.at(nr, nc)] = dist[queue[q]] + 1;
      queue.push_back(s.at(nr, nc));
    }
  }
  return dist;
}

}  // namespace

void SimpleAgent::on_setup() {
  if (!is_raw_bomber_spec(obs_spec())) {
    throw SetupError("bomber.simple needs a bomber observation, got " + describe(obs_spec()));
  }
  if (!act_spec().is_discrete() || act_spec().n() != static_cast<std::int64_t>(kActions)) {
    throw SetupError("bomber.simple needs the 6-way discrete action");
  }
}

Value SimpleAgent::act(const Value& obs, double, bool) {
  const BomberState s = from_obs(obs);
  const auto self = static_cast<std::size_t>(obs.at("self").index());
  const auto& me = s.agents.at(self);
  if (!me.alive) return Value::discrete(Idle);
  const bool teams_mode = obs.at("mode").scalar() > 0.5;
  const int flame_life = static_cast<int>(obs_spec().at("flames").high());
  const DangerMap d = danger_map(s, flame_life);
  const auto here = s.at(me.row, me.col);

  // 1. Get out of the way of anything about to explode.
  bool threatened = d.any_from(here, 1);
  for (std::size_t a = Up; a <= Right && !threatened; ++a) {
    const int r = me.row + kDelta[a][0], c = me.col + kDelta[a][1];
    if (!s.on_board(r, c)) continue;
    for (int t = 1; t <= std::min(2, d.horizon); ++t) threatened = threatened || d.at[static_cast<std::size_t>(t)][s.at(r, c)];
  }
  if (threatened) return Value::discrete(escape(s, self, d, 0).value_or(Idle));

  std::vector<std::size_t> enemies;
  bool enemy_adjacent = false;
  for (std::size_t j = 0; j < kAgents; ++j) {
    const auto& a = s.agents[j];
    if (j == self || !a.alive || teammates(teams_mode, j, self)) continue;
    enemies.push_back(s.at(a.row, a.col));
    enemy_adjacent = enemy_adjacent || std::abs(a.row - me.row) + std::abs(a.col - me.col) == 1;
  }
  bool wood_adjacent = false;
  for (std::size_t a = Up; a <= Right; ++a) {
    const int r = me.row + kDelta[a][0], c = me.col + kDelta[a][1];
    wood_adjacent = wood_adjacent || (s.on_board(r, c) && s.board[s.at(r, c)] == Cell::Wood);
  }

  // 2. Bomb wood or an enemy next to us, if we can still get away.
  if ((wood_adjacent || enemy_adjacent) && legal_actions(s, self)[PlaceBomb]) {
    BomberState with_bomb = s;
    with_bomb.bombs.push_back({me.row, me.col, self, bomb_life_ + 1, me.blast});
    const DangerMap d2 = danger_map(with_bomb, flame_life);
    // The placing tick is spent standing still.
    if (!d2.at[1][here] && escape(with_bomb, self, d2, 1)) return Value::discrete(PlaceBomb);
  }

  // 3. Walk towards the nearest enemy, or failing that towards wood.
  auto step_towards = [&](const std::vector<std::size_t>& targets) -> std::optional<Action> {
    if (targets.empty()) return std::nullopt;
    const auto dist = distances(s, targets);
    if (dist[here] <= 0) return std::nullopt;
    for (std::size_t a = Up; a <= Right; ++a) {
      const int r = me.row + kDelta[a][0], c = me.col + kDelta[a][1];
      if (!passable(s, r, c) || d.any_from(s.at(r, c), 1)) continue;
      if (dist[s.at(r, c)] == dist[here] - 1) return static_cast<Action>(a);
    }
    return std::nullopt;
  };
  if (auto a = step_towards(enemies)) return Value::discrete(*a);
  std::vector<std::size_t> near_wood;
  for (int r = 0; r < s.size; ++r) {
    for (int c = 0; c < s.size; ++c) {
      if (!passable(s, r, c)) continue;
      for (std::size_t a = Up; a <= Right; ++a) {
        const int nr = r + kDelta[a][0], nc = c + kDelta[a][1];
        if (s.on_board(nr, nc) && s.board[s.at(nr, nc)] == Cell::Wood) {
          near_wood.push_back(s.at(r, c));
          break;
        }
      }
    }
  }
  if (auto a = step_towards(near_wood)) return Value::discrete(*a);
  return Value::discrete(Idle);
}

}  // namespace arena::bomber
