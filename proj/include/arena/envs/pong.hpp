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

namespace arena::pong {

struct PongConfig {
  double field_w = 80.0;
  double field_h = 80.0;
  double paddle_len = 12.0;
  double paddle_speed = 2.0;
  double ball_speed0 = 1.2;
  double speedup = 1.05;
  double max_speed = 3.0;
  double max_deflect_deg = 60.0;
  double serve_angle_deg = 30.0;
  int win_score = 5;
  std::size_t step_limit = 3000;

  // Throws ConfigError.
  void validate() const;
};

enum Move : std::int64_t { Stay = 0, Up = 1, Down = 2 };

// The ball's x is measured from the field centre (positive towards the right
// player), so mirroring the field is an exact negation. y grows downwards from
// the top wall. Side 0 defends x = -field_w/2, side 1 defends x = +field_w/2.
struct PongState {
  double ball_x = 0.0;
  double ball_y = 0.0;
  double ball_vx = 0.0;
  double ball_vy = 0.0;
  std::array<double, 2> paddle_y{};  // paddle centres
  std::array<int, 2> score{};
  std::size_t tick = 0;
};

struct Velocity {
  double vx;
  double vy;
};

// Outgoing velocity after a paddle hit. `offset_ratio` is the hit position
// relative to the paddle centre over half the paddle length; `incoming_vx`
// only contributes its sign.
Velocity bounce(const PongConfig& cfg, double offset_ratio, double speed, double incoming_vx);

PongState initial_state(const PongConfig& cfg);

// Puts the ball at the centre moving towards side 1 (direction +1) or side 0
// (direction -1) at `angle_deg` below the horizontal.
void serve(const PongConfig& cfg, PongState& s, int direction, double angle_deg);

// One physics tick: paddles move, the ball flies, bounces off walls and
// paddles. Returns the side that scored (0 or 1) or -1. Scores and the serve
// after a point are left to the caller.
int advance(const PongConfig& cfg, PongState& s, const std::array<Move, 2>& moves);

// The side's egocentric observation: it sees itself on the left.
Value observe(const PongConfig& cfg, const PongState& s, int side);
SpaceSpec observation_spec(const PongConfig& cfg);

class PongEnv final : public Env {
 public:
  explicit PongEnv(PongConfig cfg = {});

  std::string name() const override { return "pong2p"; }
  const std::vector<SpaceSpec>& observation_specs() const override { return obs_specs_; }
  const std::vector<SpaceSpec>& action_specs() const override { return act_specs_; }
  void write_state(StateHasher& h) const override;
  std::string render() const override;

  const PongConfig& config() const { return cfg_; }
  const PongState& state() const { return s_; }

 protected:
  Bundle do_reset(std::uint64_t seed) override;
  StepResult do_step(const Bundle& actions) override;

 private:
  Bundle observations() const;

  PongConfig cfg_;
  std::vector<SpaceSpec> obs_specs_;
  std::vector<SpaceSpec> act_specs_;
  PongState s_;
  RngStream serve_rng_{0};
  int next_serve_ = 1;
  std::array<Move, 2> last_{Stay, Stay};
};

// Binary raster of the egocentric view: the ball as a 2x2 block, the own paddle
// in column 0 and the opponent's in the last column. Field geometry is read
// from the raw observation spec at setup.
InterfacePtr screen_obs(std::size_t resolution);

// Rows lit by a paddle centred at `paddle_y` in a raster of `resolution` rows.
std::pair<std::size_t, std::size_t> paddle_rows(double paddle_y, double paddle_len, double field_h,
                                                std::size_t resolution);

class FollowBallAgent final : public SlotAgent {
 public:
  std::string name() const override { return "pong.follow_ball"; }

 protected:
  void on_setup() override;
  Value act(const Value& obs, double reward, bool done) override;
};

}  // namespace arena::pong
