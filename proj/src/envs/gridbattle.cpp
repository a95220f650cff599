#include "arena/envs/gridbattle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "arena/core/error.hpp"
#include "arena/envs/outcome.hpp"

namespace arena::battle {

namespace {

bool on_grid(int r, int c) { return r >= 0 && r < kGrid && c >= 0 && c < kGrid; }

double dist2(int r0, int c0, int r1, int c1) {
  const double dr = r0 - r1, dc = c0 - c1;
  return dr * dr + dc * dc;
}

}  // namespace

void BattleConfig::validate() const {
  if (scenario != "5I" && scenario != "3I2Z") {
    throw ConfigError("gridbattle: unknown scenario '" + scenario + "' (expected 5I or 3I2Z)");
  }
  if (step_limit == 0) throw ConfigError("gridbattle: step_limit must be positive");
}

std::vector<int> BattleConfig::roster() const {
  if (scenario == "3I2Z") return {kRanged, kRanged, kRanged, kMelee, kMelee};
  return std::vector<int>(5, kRanged);
}

BattleState initial_state(const BattleConfig& cfg, RngStream& rng) {
  const auto roster = cfg.roster();
  const int per_team = static_cast<int>(roster.size());
  BattleState s;
  for (int team = 0; team < 2; ++team) {
    std::vector<std::array<int, 2>> cells;
    if (cfg.randomize_positions) {
      RngStream pr = rng.child("positions", static_cast<std::uint64_t>(team));
      for (int r = 0; r < kGrid; ++r) {
        for (int c = 0; c < kGrid / 2; ++c) cells.push_back({r, team * (kGrid / 2) + c});
      }
      pr.shuffle(cells);
    } else {
      const int first_row = (kGrid - per_team) / 2;
      for (int i = 0; i < per_team; ++i) cells.push_back({first_row + i, team == 0 ? 1 : kGrid - 2});
    }
    RngStream sr = rng.child("status", static_cast<std::uint64_t>(team));
    for (int i = 0; i < per_team; ++i) {
      Unit u;
      u.team = team;
      u.kind = roster[static_cast<std::size_t>(i)];
      u.row = cells[static_cast<std::size_t>(i)][0];
      u.col = cells[static_cast<std::size_t>(i)][1];
      const auto& k = u.stats();
      if (cfg.randomize_status) {
        u.hp = sr.uniform(0.5 * k.max_hp, k.max_hp);
        u.shield = sr.uniform(0.5 * k.max_shield, k.max_shield);
        u.cd = static_cast<int>(sr.uniform_int(0, k.cooldown));
      } else {
        u.hp = k.max_hp;
        u.shield = k.max_shield;
        u.cd = 0;
      }
      s.units.push_back(u);
    }
  }
  return s;
}

int chebyshev(const Unit& a, const Unit& b) { return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)); }

std::optional<std::size_t> nearest_enemy(const BattleState& s, std::size_t slot) {
  const Unit& me = s.units.at(slot);
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t j = 0; j < s.units.size(); ++j) {
    const Unit& u = s.units[j];
    if (!u.alive || u.team == me.team) continue;
    const double d = dist2(me.row, me.col, u.row, u.col);
    if (!best || d < best_d) {
      best = j;
      best_d = d;
    }
  }
  return best;
}

Resolution resolve_step(const BattleState& s, const std::vector<std::int64_t>& actions) {
  const std::size_t n = s.units.size();
  Resolution res{s, std::vector<double>(n, 0.0)};
  auto& units = res.next.units;

  // Movement: targets must be on the grid and free at the start of the tick;
  // of several movers into one cell the lowest slot wins.
  std::vector<bool> occupied(kGrid * kGrid, false);
  for (const auto& u : s.units) {
    if (u.alive) occupied[static_cast<std::size_t>(u.row * kGrid + u.col)] = true;
  }
  std::map<int, std::size_t> claims;
  for (std::size_t i = 0; i < n; ++i) {
    const Unit& u = s.units[i];
    if (!u.alive || actions[i] >= kAttack) continue;
    const auto& m = kMoves[static_cast<std::size_t>(actions[i])];
    const int r = u.row + m[0], c = u.col + m[1];
    if (!on_grid(r, c) || occupied[static_cast<std::size_t>(r * kGrid + c)]) continue;
    claims.emplace(r * kGrid + c, i);  // keeps the first, i.e. lowest, claimant
  }
  for (const auto& [cell, i] : claims) {
    units[i].row = cell / kGrid;
    units[i].col = cell % kGrid;
  }

  // Attacks pick targets against the post-move positions and land together.
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  const BattleState moved = res.next;
  for (std::size_t i = 0; i < n; ++i) {
    const Unit& u = moved.units[i];
    if (!u.alive || actions[i] != kAttack || u.cd > 0) continue;
    auto t = nearest_enemy(moved, i);
    if (!t || chebyshev(u, moved.units[*t]) > u.stats().range) continue;
    hits.emplace_back(i, *t);
  }
  for (auto [i, t] : hits) {
    Unit& target = units[t];
    double left = units[i].stats().damage;
    const double absorbed = std::min(left, target.shield);
    target.shield -= absorbed;
    left -= absorbed;
    const double taken = std::min(left, target.hp);
    target.hp -= taken;
    res.damage_dealt[i] += absorbed + taken;
    units[i].cd = units[i].stats().cooldown;
  }

  for (auto& u : units) {
    if (!u.alive) continue;
    u.cd = std::max(0, u.cd - 1);
    if (u.hp <= 0.0) {
      u.hp = 0.0;
      u.alive = false;
    }
  }
  return res;
}

SpaceSpec observation_spec(const BattleConfig& cfg) {
  const auto roster = cfg.roster();
  std::vector<SpaceSpec> units;
  for (int team = 0; team < 2; ++team) {
    for (int kind : roster) {
      const auto& k = kKinds[static_cast<std::size_t>(kind)];
      units.push_back(SpaceSpec::mapping({
          {"alive", SpaceSpec::discrete(2)},
          {"cd", SpaceSpec::vector(1, 0.0, k.cooldown)},
          {"col", SpaceSpec::discrete(kGrid)},
          {"damage", SpaceSpec::constant(k.damage)},
          {"hp", SpaceSpec::vector(1, 0.0, k.max_hp)},
          {"kind", SpaceSpec::constant(kind)},
          {"row", SpaceSpec::discrete(kGrid)},
          {"shield", SpaceSpec::vector(1, 0.0, k.max_shield)},
          {"team", SpaceSpec::constant(team)},
      }));
    }
  }
  const auto n = static_cast<std::int64_t>(units.size());
  return SpaceSpec::mapping({
      {"self", SpaceSpec::discrete(n)},
      {"tick", SpaceSpec::vector(1, 0.0, static_cast<double>(cfg.step_limit))},
      {"units", SpaceSpec::seq(std::move(units))},
  });
}

namespace {

Value units_value(const BattleState& s) {
  std::vector<Value> units;
  for (const auto& u : s.units) {
    units.push_back(Value::mapping({
        {"alive", Value::discrete(u.alive ? 1 : 0)},
        {"cd", Value::scalar(u.cd)},
        {"col", Value::discrete(u.col)},
        {"damage", Value::scalar(u.stats().damage)},
        {"hp", Value::scalar(u.hp)},
        {"kind", Value::scalar(u.kind)},
        {"row", Value::discrete(u.row)},
        {"shield", Value::scalar(u.shield)},
        {"team", Value::scalar(u.team)},
    }));
  }
  return Value::seq(std::move(units));
}

Value observe_with(const Value& units, std::size_t tick, std::size_t self) {
  return Value::mapping({
      {"self", Value::discrete(static_cast<std::int64_t>(self))},
      {"tick", Value::scalar(static_cast<double>(tick))},
      {"units", units},
  });
}

// Units recovered from a raw observation.
std::vector<Unit> parse_units(const Value& raw) {
  std::vector<Unit> out;
  for (const auto& v : raw.at("units").items()) {
    Unit u;
    u.alive = v.at("alive").index() != 0;
    u.team = static_cast<int>(v.at("team").scalar());
    u.kind = static_cast<int>(v.at("kind").scalar());
    u.row = static_cast<int>(v.at("row").index());
    u.col = static_cast<int>(v.at("col").index());
    u.hp = v.at("hp").scalar();
    u.shield = v.at("shield").scalar();
    u.cd = static_cast<int>(v.at("cd").scalar());
    out.push_back(u);
  }
  return out;
}

bool is_raw_battle_spec(const SpaceSpec& s) {
  if (!s.is_mapping() || !s.find("units") || !s.find("self") || !s.at("units").is_seq()) return false;
  for (const auto& u : s.at("units").items()) {
    if (!u.is_mapping()) return false;
    for (const char* key : {"alive", "cd", "col", "damage", "hp", "kind", "row", "shield", "team"}) {
      if (!u.find(key)) return false;
    }
  }
  return true;
}

}  // namespace

Value observe(const BattleConfig&, const BattleState& s, std::size_t self) {
  return observe_with(units_value(s), s.tick, self);
}

BattleEnv::BattleEnv(BattleConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::size_t n = 2 * cfg_.roster().size();
  obs_specs_.assign(n, observation_spec(cfg_));
  act_specs_.assign(n, SpaceSpec::discrete(9));
  last_.assign(n, 0);
}

std::vector<std::vector<std::size_t>> BattleEnv::teams() const {
  const std::size_t half = slot_count() / 2;
  std::vector<std::vector<std::size_t>> t(2);
  for (std::size_t i = 0; i < slot_count(); ++i) t[i < half ? 0 : 1].push_back(i);
  return t;
}

Bundle BattleEnv::observations() const {
  const Value units = units_value(s_);
  Bundle out;
  for (std::size_t i = 0; i < s_.units.size(); ++i) out.push_back(observe_with(units, s_.tick, i));
  return out;
}

Bundle BattleEnv::do_reset(std::uint64_t seed) {
  RngStream rng(seed, {"gridbattle"});
  s_ = initial_state(cfg_, rng);
  std::fill(last_.begin(), last_.end(), 0);
  return observations();
}

Bundle BattleEnv::load(BattleState s) {
  if (!started() || done()) throw EpisodeOver("gridbattle: load needs a live episode");
  if (s.units.size() != slot_count()) throw ConfigError("gridbattle: loaded state has the wrong unit count");
  s_ = std::move(s);
  return observations();
}

StepResult BattleEnv::do_step(const Bundle& actions) {
  for (std::size_t i = 0; i < actions.size(); ++i) last_[i] = actions[i].index();
  Resolution res = resolve_step(s_, last_);
  s_ = std::move(res.next);
  ++s_.tick;

  StepResult r;
  bool alive_team[2] = {false, false};
  for (const auto& u : s_.units) {
    r.alive.push_back(u.alive);
    if (u.alive) alive_team[u.team] = true;
  }
  for (double d : res.damage_dealt) r.rewards.push_back(d / 100.0);

  const bool wiped = !alive_team[0] || !alive_team[1];
  r.done = wiped || s_.tick >= cfg_.step_limit;
  if (r.done) {
    std::optional<std::size_t> winner;
    if (alive_team[0] != alive_team[1]) winner = alive_team[0] ? 0 : 1;
    if (winner) {
      for (std::size_t i = 0; i < s_.units.size(); ++i) {
        r.rewards[i] += s_.units[i].team == static_cast<int>(*winner) ? 1.0 : -1.0;
      }
    }
    r.info = terminal_info(teams(), winner);
  }
  r.obs = observations();
  return r;
}

void BattleEnv::write_state(StateHasher& h) const {
  h.str("gridbattle");
  h.u64(s_.tick);
  for (const auto& u : s_.units) {
    h.i64(u.team);
    h.i64(u.kind);
    h.i64(u.row);
    h.i64(u.col);
    h.f64(u.hp);
    h.f64(u.shield);
    h.i64(u.cd);
    h.boolean(u.alive);
  }
  for (auto a : last_) h.i64(a);
}

std::string BattleEnv::render() const {
  std::vector<std::string> rows(kGrid, std::string(kGrid, '.'));
  for (const auto& u : s_.units) {
    if (!u.alive) continue;
    char ch = u.kind == kRanged ? 'I' : 'Z';
    if (u.team == 1) ch = static_cast<char>(ch - 'A' + 'a');
    rows[static_cast<std::size_t>(u.row)][static_cast<std::size_t>(u.col)] = ch;
  }
  std::ostringstream os;
  os << "tick " << s_.tick << "\n";
  for (const auto& r : rows) os << r << "\n";
  return os.str();
}

namespace {

enum class Layout { FiveI, ThreeITwoZ };

class ImageEncoder final : public SlotwiseInterface {
 public:
  explicit ImageEncoder(Layout layout) : layout_(layout) {}

  std::string name() const override { return layout_ == Layout::FiveI ? "battle.img5i" : "battle.img3i2z"; }

  GridShape shape() const { return {kGrid, kGrid, layout_ == Layout::FiveI ? 6u : 16u}; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t slot, const SpaceSpec& inner) override {
    if (!is_raw_battle_spec(inner)) {
      throw SetupError(name() + ": slot " + std::to_string(slot) + " is not a raw gridbattle observation");
    }
    const auto& units = inner.at("units").items();
    int counts[2][2] = {{0, 0}, {0, 0}};
    max_damage_ = 0.0;
    maxima_.clear();
    for (const auto& u : units) {
      const int team = static_cast<int>(u.at("team").low());
      const int kind = static_cast<int>(u.at("kind").low());
      if (team < 0 || team > 1 || kind < 0 || kind > 1) throw SetupError(name() + ": bad unit descriptor");
      ++counts[team][kind];
      max_damage_ = std::max(max_damage_, u.at("damage").high());
      maxima_.push_back({u.at("hp").high(), u.at("shield").high(), u.at("cd").high()});
    }
    const bool five_i = counts[0][kRanged] == 5 && counts[1][kRanged] == 5 && counts[0][kMelee] == 0 &&
                        counts[1][kMelee] == 0;
    const bool three_two = counts[0][kRanged] == 3 && counts[1][kRanged] == 3 && counts[0][kMelee] == 2 &&
                           counts[1][kMelee] == 2;
    if (layout_ == Layout::FiveI && !five_i) throw SetupError(name() + " requires the 5I scenario");
    if (layout_ == Layout::ThreeITwoZ && !three_two) throw SetupError(name() + " requires the 3I2Z scenario");
    return SpaceSpec::grid(shape(), 0.0, 1.0);
  }

  Value obs(std::size_t, const Value& raw) override {
    const auto units = parse_units(raw);
    const int my_team = units.at(static_cast<std::size_t>(raw.at("self").index())).team;
    const GridShape g = shape();
    std::vector<double> px(g.size(), 0.0);
    for (std::size_t i = 0; i < units.size(); ++i) {
      const Unit& u = units[i];
      if (!u.alive) continue;
      const auto& m = maxima_[i];
      const std::size_t side = u.team == my_team ? 0 : 1;
      const double stats[4] = {u.hp / m[0], u.shield / m[1], m[2] > 0 ? u.cd / m[2] : 0.0,
                               u.stats().damage / max_damage_};
      const std::size_t base = (static_cast<std::size_t>(u.row) * g.width + static_cast<std::size_t>(u.col)) *
                               g.channels;
      if (layout_ == Layout::FiveI) {
        for (std::size_t k = 0; k < 3; ++k) px[base + side * 3 + k] = stats[k];
      } else {
        const std::size_t off = side * 8 + static_cast<std::size_t>(u.kind) * 4;
        for (std::size_t k = 0; k < 4; ++k) px[base + off + k] = stats[k];
      }
    }
    return Value::grid(g, std::move(px));
  }

 private:
  Layout layout_;
  double max_damage_ = 1.0;
  std::vector<std::array<double, 3>> maxima_;
};

class DeadPadding final : public Interface {
 public:
  explicit DeadPadding(InterfacePtr encoder) : enc_(std::move(encoder)) {}

  std::string name() const override { return "battle.dead_pad"; }

 protected:
  Specs do_setup(const Specs& inner) override {
    for (std::size_t i = 0; i < inner.obs.size(); ++i) {
      if (!is_raw_battle_spec(inner.obs[i])) {
        throw SetupError("battle.dead_pad: slot " + std::to_string(i) + " is not a raw gridbattle observation");
      }
    }
    if (!enc_) {
      std::size_t melee = 0;
      for (const auto& u : inner.obs[0].at("units").items()) melee += u.at("kind").low() == kMelee;
      enc_ = melee ? img3i2z() : img5i();
    }
    const Specs& e = enc_->setup(inner);
    if (e.slot_count() != inner.slot_count()) throw SetupError("battle.dead_pad: encoder must keep the slot count");
    Specs out;
    out.act = e.act;
    for (const auto& s : e.obs) {
      if (!s.is_grid()) throw SetupError("battle.dead_pad: encoder must produce grids, got " + describe(s));
      out.obs.push_back(SpaceSpec::mapping({{"alive", SpaceSpec::vector(1, 0.0, 1.0)}, {"obs", s}}));
    }
    return out;
  }

  Bundle do_reset(const Bundle& first) override { return pad(first, enc_->reset(first)); }

  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) override {
    Observed o = enc_->obs_trans(obs, rewards);
    o.obs = pad(obs, o.obs);
    return o;
  }

  Bundle do_act_trans(const Bundle& outer) override { return enc_->act_trans(outer); }

 private:
  Bundle pad(const Bundle& raw, const Bundle& encoded) const {
    Bundle out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto self = static_cast<std::size_t>(raw[i].at("self").index());
      const bool alive = raw[i].at("units").items().at(self).at("alive").index() != 0;
      out.push_back(Value::mapping({
          {"alive", Value::scalar(alive ? 1.0 : 0.0)},
          {"obs", alive ? encoded[i] : Value::zeros(encoded[i].shape())},
      }));
    }
    return out;
  }

  InterfacePtr enc_;
};

}  // namespace

InterfacePtr img5i() { return std::make_unique<ImageEncoder>(Layout::FiveI); }
InterfacePtr img3i2z() { return std::make_unique<ImageEncoder>(Layout::ThreeITwoZ); }
InterfacePtr dead_padding(InterfacePtr encoder) { return std::make_unique<DeadPadding>(std::move(encoder)); }

void HitAndRunAgent::on_setup() {
  if (!is_raw_battle_spec(obs_spec())) {
    throw SetupError("battle.hit_and_run needs the raw gridbattle observation, got " + describe(obs_spec()));
  }
  if (!act_spec().is_discrete() || act_spec().n() != 9) {
    throw SetupError("battle.hit_and_run needs the 9-way discrete action");
  }
}

Value HitAndRunAgent::act(const Value& obs, double, bool) {
  BattleState s;
  s.units = parse_units(obs);
  const auto self = static_cast<std::size_t>(obs.at("self").index());
  const Unit& me = s.units.at(self);
  const auto target = nearest_enemy(s, self);
  if (!me.alive || !target) return Value::discrete(kAttack);
  const Unit& enemy = s.units[*target];
  if (me.cd == 0 && chebyshev(me, enemy) <= me.stats().range) return Value::discrete(kAttack);

  const bool retreat = me.cd > 0;
  std::optional<std::int64_t> best;
  double best_d = 0.0;
  for (std::size_t a = 0; a < kMoves.size(); ++a) {
    const int r = me.row + kMoves[a][0], c = me.col + kMoves[a][1];
    if (!on_grid(r, c)) continue;
    const bool taken = std::any_of(s.units.begin(), s.units.end(),
                                   [&](const Unit& u) { return u.alive && u.row == r && u.col == c; });
    if (taken) continue;
    const double d = dist2(r, c, enemy.row, enemy.col);
    if (!best || (retreat ? d > best_d : d < best_d)) {
      best = static_cast<std::int64_t>(a);
      best_d = d;
    }
  }
  return Value::discrete(best.value_or(kAttack));
}

}  // namespace arena::battle
