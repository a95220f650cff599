#include "arena/envs/pong.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "arena/core/error.hpp"
#include "arena/envs/outcome.hpp"

namespace arena::pong {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Half the ball's extent; a paddle returns the ball if the centres are within
// paddle_len/2 + kBallHalf.
constexpr double kBallHalf = 1.0;

// Reflects y back into [0, h] off the walls, flipping vy on every bounce.
void fold(double& y, double& vy, double h) {
  while (y < 0.0 || y > h) {
    if (y < 0.0) {
      y = -y;
    } else {
      y = 2.0 * h - y;
    }
    vy = -vy;
  }
}

}  // namespace

void PongConfig::validate() const {
  auto pos = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string("pong: ") + what + " must be positive");
  };
  pos(field_w, "field_w");
  pos(field_h, "field_h");
  pos(paddle_len, "paddle_len");
  pos(paddle_speed, "paddle_speed");
  pos(ball_speed0, "ball_speed0");
  pos(speedup, "speedup");
  pos(max_speed, "max_speed");
  pos(max_deflect_deg, "max_deflect_deg");
  if (serve_angle_deg < 0.0 || serve_angle_deg >= 90.0) throw ConfigError("pong: serve_angle_deg must be in [0, 90)");
  if (max_deflect_deg >= 90.0) throw ConfigError("pong: max_deflect_deg must be below 90");
  if (win_score <= 0) throw ConfigError("pong: win_score must be positive");
  if (step_limit == 0) throw ConfigError("pong: step_limit must be positive");
  if (paddle_len >= field_h) throw ConfigError("pong: paddle_len must be shorter than field_h");
  if (ball_speed0 > max_speed) throw ConfigError("pong: ball_speed0 exceeds max_speed");
}

Velocity bounce(const PongConfig& cfg, double offset_ratio, double speed, double incoming_vx) {
  const double angle = std::clamp(offset_ratio, -1.0, 1.0) * cfg.max_deflect_deg * kDeg;
  const double out = std::min(speed * cfg.speedup, cfg.max_speed);
  const double dir = incoming_vx < 0.0 ? 1.0 : -1.0;
  return {dir * out * std::cos(angle), out * std::sin(angle)};
}

PongState initial_state(const PongConfig& cfg) {
  PongState s;
  s.ball_y = cfg.field_h / 2.0;
  s.paddle_y = {cfg.field_h / 2.0, cfg.field_h / 2.0};
  return s;
}

void serve(const PongConfig& cfg, PongState& s, int direction, double angle_deg) {
  s.ball_x = 0.0;
  s.ball_y = cfg.field_h / 2.0;
  s.ball_vx = (direction < 0 ? -1.0 : 1.0) * cfg.ball_speed0 * std::cos(angle_deg * kDeg);
  s.ball_vy = cfg.ball_speed0 * std::sin(angle_deg * kDeg);
}

int advance(const PongConfig& cfg, PongState& s, const std::array<Move, 2>& moves) {
  const double half_len = cfg.paddle_len / 2.0;
  for (int side = 0; side < 2; ++side) {
    double& p = s.paddle_y[side];
    if (moves[side] == Up) p -= cfg.paddle_speed;
    if (moves[side] == Down) p += cfg.paddle_speed;
    p = std::clamp(p, half_len, cfg.field_h - half_len);
  }
  ++s.tick;

  const double half_w = cfg.field_w / 2.0;
  const double nx = s.ball_x + s.ball_vx;
  // The side whose face the ball crosses this tick, if any.
  int side = -1;
  double face = 0.0;
  if (nx < -half_w) {
    side = 0;
    face = -half_w;
  } else if (nx > half_w) {
    side = 1;
    face = half_w;
  }
  if (side < 0) {
    s.ball_x = nx;
    s.ball_y += s.ball_vy;
    fold(s.ball_y, s.ball_vy, cfg.field_h);
    return -1;
  }

  const double t = (face - s.ball_x) / s.ball_vx;
  double y_hit = s.ball_y + t * s.ball_vy;
  double vy_hit = s.ball_vy;
  fold(y_hit, vy_hit, cfg.field_h);
  const double d = y_hit - s.paddle_y[side];
  if (std::abs(d) > half_len + kBallHalf) {
    s.ball_x = 0.0;
    s.ball_y = cfg.field_h / 2.0;
    s.ball_vx = 0.0;
    s.ball_vy = 0.0;
    return 1 - side;
  }
  const Velocity v = bounce(cfg, d / half_len, std::hypot(s.ball_vx, s.ball_vy), s.ball_vx);
  const double rest = 1.0 - t;
  s.ball_x = face + rest * v.vx;
  s.ball_vx = v.vx;
  s.ball_vy = v.vy;
  s.ball_y = y_hit + rest * v.vy;
  fold(s.ball_y, s.ball_vy, cfg.field_h);
  return -1;
}

SpaceSpec observation_spec(const PongConfig& cfg) {
  const double half_len = cfg.paddle_len / 2.0;
  return SpaceSpec::mapping({
      {"ball_x", SpaceSpec::vector(1, 0.0, cfg.field_w)},
      {"ball_y", SpaceSpec::vector(1, 0.0, cfg.field_h)},
      {"ball_vx", SpaceSpec::vector(1, -cfg.max_speed, cfg.max_speed)},
      {"ball_vy", SpaceSpec::vector(1, -cfg.max_speed, cfg.max_speed)},
      {"own_paddle_y", SpaceSpec::vector(1, half_len, cfg.field_h - half_len)},
      {"opp_paddle_y", SpaceSpec::vector(1, half_len, cfg.field_h - half_len)},
      {"own_side", SpaceSpec::discrete(2)},
  });
}

Value observe(const PongConfig& cfg, const PongState& s, int side) {
  const double x_left = cfg.field_w / 2.0 + s.ball_x;
  const bool right = side == 1;
  return Value::mapping({
      {"ball_x", Value::scalar(right ? cfg.field_w - x_left : x_left)},
      {"ball_y", Value::scalar(s.ball_y)},
      {"ball_vx", Value::scalar(right ? -s.ball_vx : s.ball_vx)},
      {"ball_vy", Value::scalar(s.ball_vy)},
      {"own_paddle_y", Value::scalar(s.paddle_y[side])},
      {"opp_paddle_y", Value::scalar(s.paddle_y[1 - side])},
      {"own_side", Value::discrete(side)},
  });
}

PongEnv::PongEnv(PongConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  obs_specs_.assign(2, observation_spec(cfg_));
  act_specs_.assign(2, SpaceSpec::discrete(3));
  s_ = initial_state(cfg_);
}

Bundle PongEnv::observations() const { return {observe(cfg_, s_, 0), observe(cfg_, s_, 1)}; }

Bundle PongEnv::do_reset(std::uint64_t seed) {
  serve_rng_ = RngStream(seed, {"pong", "serve"});
  s_ = initial_state(cfg_);
  last_ = {Stay, Stay};
  const int first = serve_rng_.bernoulli(0.5) ? 1 : -1;
  serve(cfg_, s_, first, serve_rng_.uniform(-cfg_.serve_angle_deg, cfg_.serve_angle_deg));
  next_serve_ = -first;
  return observations();
}

StepResult PongEnv::do_step(const Bundle& actions) {
  last_ = {static_cast<Move>(actions[0].index()), static_cast<Move>(actions[1].index())};
  StepResult r;
  r.rewards = {0.0, 0.0};
  const int scorer = advance(cfg_, s_, last_);
  if (scorer >= 0) {
    ++s_.score[scorer];
    r.rewards[scorer] = 1.0;
    r.rewards[1 - scorer] = -1.0;
    if (s_.score[scorer] >= cfg_.win_score) {
      r.done = true;
    } else {
      serve(cfg_, s_, next_serve_, serve_rng_.uniform(-cfg_.serve_angle_deg, cfg_.serve_angle_deg));
      next_serve_ = -next_serve_;
    }
  }
  if (s_.tick >= cfg_.step_limit) r.done = true;
  r.obs = observations();
  r.alive = {true, true};
  if (r.done) {
    std::optional<std::size_t> winner;
    if (s_.score[0] != s_.score[1]) winner = s_.score[0] > s_.score[1] ? 0 : 1;
    r.info = terminal_info(teams(), winner);
  }
  return r;
}

void PongEnv::write_state(StateHasher& h) const {
  h.str("pong2p");
  h.u64(s_.tick);
  for (double x : {s_.ball_x, s_.ball_y, s_.ball_vx, s_.ball_vy, s_.paddle_y[0], s_.paddle_y[1]}) h.f64(x);
  h.i64(s_.score[0]);
  h.i64(s_.score[1]);
  h.i64(next_serve_);
  h.i64(last_[0]);
  h.i64(last_[1]);
}

std::pair<std::size_t, std::size_t> paddle_rows(double paddle_y, double paddle_len, double field_h,
                                                std::size_t resolution) {
  const double res = static_cast<double>(resolution);
  const double top = std::floor((paddle_y - paddle_len / 2.0) / field_h * res);
  const double bottom = std::ceil((paddle_y + paddle_len / 2.0) / field_h * res) - 1.0;
  const double last = res - 1.0;
  return {static_cast<std::size_t>(std::clamp(top, 0.0, last)),
          static_cast<std::size_t>(std::clamp(bottom, 0.0, last))};
}

namespace {

struct Geometry {
  double w = 0.0;
  double h = 0.0;
  double paddle_len = 0.0;
};

std::vector<double> rasterize(const Geometry& g, std::size_t res, double ball_x, double ball_y,
                              double own_y, double opp_y) {
  std::vector<double> px(res * res, 0.0);
  auto lit = [&](std::size_t r, std::size_t c) { px[r * res + c] = 1.0; };
  auto cell = [&](double v, double extent) {
    const double k = std::floor(v / extent * static_cast<double>(res));
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(res - 2)));
  };
  const std::size_t bc = cell(ball_x, g.w), br = cell(ball_y, g.h);
  for (std::size_t dr = 0; dr < 2; ++dr) {
    for (std::size_t dc = 0; dc < 2; ++dc) lit(br + dr, bc + dc);
  }
  auto [a0, a1] = paddle_rows(own_y, g.paddle_len, g.h, res);
  for (auto r = a0; r <= a1; ++r) lit(r, 0);
  auto [b0, b1] = paddle_rows(opp_y, g.paddle_len, g.h, res);
  for (auto r = b0; r <= b1; ++r) lit(r, res - 1);
  return px;
}

class ScreenObs final : public SlotwiseInterface {
 public:
  explicit ScreenObs(std::size_t res) : res_(res) {
    if (res < 16) throw ConfigError("pong.screen_obs: resolution must be at least 16");
  }
  std::string name() const override { return "pong.screen_obs"; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t slot, const SpaceSpec& inner) override {
    for (const char* key : {"ball_x", "ball_y", "own_paddle_y", "opp_paddle_y"}) {
      if (!inner.is_mapping() || !inner.find(key)) {
        throw SetupError("pong.screen_obs: slot " + std::to_string(slot) + " is not a raw pong observation");
      }
    }
    if (geo_.size() <= slot) geo_.resize(slot + 1);
    geo_[slot] = {inner.at("ball_x").high(), inner.at("ball_y").high(), 2.0 * inner.at("own_paddle_y").low()};
    return SpaceSpec::grid({res_, res_, 1}, 0.0, 1.0);
  }

  Value obs(std::size_t slot, const Value& v) override {
    return Value::grid({res_, res_, 1},
                       rasterize(geo_[slot], res_, v.at("ball_x").scalar(), v.at("ball_y").scalar(),
                                 v.at("own_paddle_y").scalar(), v.at("opp_paddle_y").scalar()));
  }

 private:
  std::size_t res_;
  std::vector<Geometry> geo_;
};

}  // namespace

InterfacePtr screen_obs(std::size_t resolution) { return std::make_unique<ScreenObs>(resolution); }

std::string PongEnv::render() const {
  constexpr std::size_t kRes = 40;
  const Geometry g{cfg_.field_w, cfg_.field_h, cfg_.paddle_len};
  const auto px = rasterize(g, kRes, cfg_.field_w / 2.0 + s_.ball_x, s_.ball_y, s_.paddle_y[0], s_.paddle_y[1]);
  std::ostringstream os;
  os << "tick " << s_.tick << "  score " << s_.score[0] << ":" << s_.score[1] << "\n";
  os << '+' << std::string(kRes, '-') << "+\n";
  // Two raster rows per text line keeps the field roughly square.
  for (std::size_t r = 0; r < kRes; r += 2) {
    os << '|';
    for (std::size_t c = 0; c < kRes; ++c) {
      const bool on = px[r * kRes + c] > 0.0 || px[(r + 1) * kRes + c] > 0.0;
      os << (on ? (c == 0 || c == kRes - 1 ? '#' : 'o') : ' ');
    }
    os << "|\n";
  }
  os << '+' << std::string(kRes, '-') << "+\n";
  return os.str();
}

void FollowBallAgent::on_setup() {
  const auto& s = obs_spec();
  if (!s.is_mapping() || !s.find("ball_y") || !s.find("own_paddle_y")) {
    throw SetupError("pong.follow_ball needs the raw pong observation, got " + describe(s));
  }
  if (!act_spec().is_discrete() || act_spec().n() < 3) {
    throw SetupError("pong.follow_ball needs the discrete {stay, up, down} action");
  }
}

Value FollowBallAgent::act(const Value& obs, double, bool) {
  constexpr double kDeadzone = 1.0;
  const double ball = obs.at("ball_y").scalar();
  const double paddle = obs.at("own_paddle_y").scalar();
  if (ball < paddle - kDeadzone) return Value::discrete(Up);
  if (ball > paddle + kDeadzone) return Value::discrete(Down);
  return Value::discrete(Stay);
}

}  // namespace arena::pong
