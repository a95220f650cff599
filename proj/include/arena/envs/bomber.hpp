#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "arena/core/agent.hpp"
#include "arena/core/env.hpp"
#include "arena/core/rng.hpp"
#include "arena/interface/interface.hpp"

namespace arena::bomber {

enum Action : std::int64_t { Idle = 0, Up = 1, Down = 2, Left = 3, Right = 4, PlaceBomb = 5 };
inline constexpr std::size_t kActions = 6;
inline constexpr std::size_t kAgents = 4;

// Row/column step of each action; zero for Idle and PlaceBomb.
inline constexpr std::array<std::array<int, 2>, kActions> kDelta{{
    {0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}, {0, 0},
}};

enum class Cell : std::uint8_t { Passage = 0, Rigid = 1, Wood = 2 };
enum class Powerup : std::uint8_t { None = 0, Ammo = 1, Blast = 2 };
enum class Mode { FFA, Teams };

struct BomberConfig {
  int size = 11;
  Mode mode = Mode::FFA;
  std::size_t step_limit = 800;
  int bomb_life = 10;
  int flame_life = 2;
  int initial_ammo = 1;
  int initial_blast = 2;
  double wood_density = 0.35;
  double powerup_prob = 0.5;

  void validate() const;
};

struct Bomb {
  int row = 0;
  int col = 0;
  std::size_t owner = 0;
  int fuse = 0;
  int blast = 0;
};

struct AgentState {
  int row = 0;
  int col = 0;
  int ammo = 0;
  int blast = 0;
  bool alive = true;
};

// Row-major boards of size*size cells.
struct BomberState {
  int size = 11;
  std::vector<Cell> board;
  std::vector<Powerup> hidden;   // under wood
  std::vector<Powerup> exposed;  // lying on passages
  std::vector<int> flame;        // remaining flame ticks, 0 = none
  std::vector<Bomb> bombs;
  std::array<AgentState, kAgents> agents{};
  std::size_t tick = 0;

  std::size_t at(int r, int c) const { return static_cast<std::size_t>(r * size + c); }
  bool on_board(int r, int c) const { return r >= 0 && r < size && c >= 0 && c < size; }
  bool has_bomb(int r, int c) const;
};

// Start corners: slot 0 top-left, then clockwise.
std::array<std::array<int, 2>, kAgents> start_cells(int size);
// Slots grouped by side: four singletons in FFA, {0,2} and {1,3} in 2v2.
std::vector<std::vector<std::size_t>> mode_teams(Mode mode);

BomberState generate(const BomberConfig& cfg, RngStream& rng);

// Rotates a position by 90 degrees counter-clockwise on an n x n board.
std::array<int, 2> rotate_ccw(int r, int c, int n);

// One tick without termination or rewards: explosions, flame deaths, moves,
// bomb placement, power-up pickup. Actions of dead agents are ignored.
void advance(const BomberConfig& cfg, BomberState& s, const std::array<Action, kAgents>& actions);

// Cells covered by the explosion of `b` (its own cell included) on
// the given board, ignoring chains.
std::vector<std::size_t> blast_cells(const BomberState& s, const Bomb& b);

// 0/1 per action; dead agents may only idle.
std::array<bool, kActions> legal_actions(const BomberState& s, std::size_t slot);

SpaceSpec observation_spec(const BomberConfig& cfg);
Value observe(const BomberConfig& cfg, const BomberState& s, std::size_t self);

class BomberEnv final : public Env {
 public:
  explicit BomberEnv(BomberConfig cfg = {});

  std::string name() const override { return "bomber"; }
  const std::vector<SpaceSpec>& observation_specs() const override { return obs_specs_; }
  const std::vector<SpaceSpec>& action_specs() const override { return act_specs_; }
  std::vector<std::vector<std::size_t>> teams() const override { return mode_teams(cfg_.mode); }
  void write_state(StateHasher& h) const override;
  std::string render() const override;

  const BomberConfig& config() const { return cfg_; }
  const BomberState& state() const { return s_; }
  // Replaces the current state of a live episode (scripted scenarios).
  Bundle load(BomberState s);

 protected:
  Bundle do_reset(std::uint64_t seed) override;
  StepResult do_step(const Bundle& actions) override;

 private:
  Bundle observations() const;

  BomberConfig cfg_;
  std::vector<SpaceSpec> obs_specs_;
  std::vector<SpaceSpec> act_specs_;
  BomberState s_;
  std::array<Action, kAgents> last_{};
};

// Appends "board_map", an [n,n,8] one-hot grid with channels rigid, wood,
// bomb, flame, power-up, self, teammates, enemies.
InterfacePtr board_map_obs();
// Appends "attrs": [ammo/10, blast/10, alive, tick/step_limit].
InterfacePtr attr_obs();
// Appends "action_mask", the legal_actions vector of the observing agent.
InterfacePtr act_mask_obs();
// Shows agent k the board rotated 90*k degrees counter-clockwise, so every
// agent sees itself starting top-left, and maps its directional actions back
// to the world frame.
InterfacePtr rotate_itf();

// World-frame action for a directional action chosen in a view rotated k
// quarter turns counter-clockwise.
Action view_to_world(Action a, int k);
Action world_to_view(Action a, int k);

// Rule-based player: flee danger, bomb adjacent wood or enemies when an
// escape exists, otherwise walk towards the nearest enemy (or wood).
// `bomb_life` must match the environment's fuse length.
class SimpleAgent final : public SlotAgent {
 public:
  explicit SimpleAgent(int bomb_life = BomberConfig{}.bomb_life) : bomb_life_(bomb_life) {}
  std::string name() const override { return "bomber.simple"; }

 protected:
  void on_setup() override;
  Value act(const Value& obs, double reward, bool done) override;

 private:
  int bomb_life_;
};

}  // namespace arena::bomber
