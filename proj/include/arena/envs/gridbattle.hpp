#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arena/core/agent.hpp"
#include "arena/core/env.hpp"
#include "arena/core/rng.hpp"
#include "arena/interface/interface.hpp"

namespace arena::battle {

inline constexpr int kGrid = 8;
inline constexpr std::int64_t kAttack = 8;

struct UnitKind {
  const char* name;
  double max_hp;
  double max_shield;
  double damage;
  int cooldown;
  int range;  // Chebyshev cells
};

inline constexpr std::array<UnitKind, 2> kKinds{{
    {"ranged", 100.0, 50.0, 20.0, 3, 3},
    {"melee", 120.0, 30.0, 16.0, 2, 1},
}};
inline constexpr int kRanged = 0;
inline constexpr int kMelee = 1;

// Row/column offsets of move actions 0..7: N, NE, E, SE, S, SW, W, NW.
inline constexpr std::array<std::array<int, 2>, 8> kMoves{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

struct Unit {
  int team = 0;
  int kind = kRanged;
  int row = 0;
  int col = 0;
  double hp = 0.0;
  double shield = 0.0;
  int cd = 0;
  bool alive = true;

  const UnitKind& stats() const { return kKinds[static_cast<std::size_t>(kind)]; }
};

struct BattleConfig {
  std::string scenario = "5I";  // "5I" or "3I2Z"
  bool randomize_status = false;
  bool randomize_positions = true;
  std::size_t step_limit = 200;

  void validate() const;
  // Unit kinds of one team, in slot order.
  std::vector<int> roster() const;
};

// Units in slot order: team 0 first, then team 1.
struct BattleState {
  std::vector<Unit> units;
  std::size_t tick = 0;
};

BattleState initial_state(const BattleConfig& cfg, RngStream& rng);

// Living enemy of `slot` closest by Euclidean distance, ties to the lower slot.
std::optional<std::size_t> nearest_enemy(const BattleState& s, std::size_t slot);
int chebyshev(const Unit& a, const Unit& b);

struct Resolution {
  BattleState next;
  std::vector<double> damage_dealt;  // per slot, this tick
};

// Movement, simultaneous attacks, cooldowns and deaths for one tick. Actions
// of dead slots are ignored. Does not advance `tick`.
Resolution resolve_step(const BattleState& s, const std::vector<std::int64_t>& actions);

SpaceSpec observation_spec(const BattleConfig& cfg);
Value observe(const BattleConfig& cfg, const BattleState& s, std::size_t self);

class BattleEnv final : public Env {
 public:
  explicit BattleEnv(BattleConfig cfg = {});

  std::string name() const override { return "gridbattle"; }
  const std::vector<SpaceSpec>& observation_specs() const override { return obs_specs_; }
  const std::vector<SpaceSpec>& action_specs() const override { return act_specs_; }
  std::vector<std::vector<std::size_t>> teams() const override;
  void write_state(StateHasher& h) const override;
  std::string render() const override;

  const BattleConfig& config() const { return cfg_; }
  const BattleState& state() const { return s_; }
  // Replaces the current state of a started episode (scripted scenarios).
  Bundle load(BattleState s);

 protected:
  Bundle do_reset(std::uint64_t seed) override;
  StepResult do_step(const Bundle& actions) override;

 private:
  Bundle observations() const;

  BattleConfig cfg_;
  std::vector<SpaceSpec> obs_specs_;
  std::vector<SpaceSpec> act_specs_;
  BattleState s_;
  std::vector<std::int64_t> last_;
};

// Egocentric [8,8,6] map: channels 0-2 ally hp/shield/cd, 3-5 enemy. Each
// stat is divided by the unit's maximum. Requires the 5I scenario.
InterfacePtr img5i();
// [8,8,16] map, channel side*8 + kind*4 + stat with stats hp/shield/cd/damage
// and side 0 = allies. Requires the 3I2Z scenario.
InterfacePtr img3i2z();
// MappingV{alive: VectorV([0|1]), obs: encoded}, where dead slots get an
// all-zero grid. Without an encoder the one matching the scenario is used.
InterfacePtr dead_padding(InterfacePtr encoder = nullptr);

class HitAndRunAgent final : public SlotAgent {
 public:
  std::string name() const override { return "battle.hit_and_run"; }

 protected:
  void on_setup() override;
  Value act(const Value& obs, double reward, bool done) override;
};

}  // namespace arena::battle
