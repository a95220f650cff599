#pragma once

#include <memory>
#include <algorithm>
#include <string>
#include <vector>

#include "arena/core/rng.hpp"
#include "arena/core/space.hpp"
#include "arena/interface/interface.hpp"

namespace testkit {

using namespace arena;

// Pass-through interface that records the order in which it is visited.
class Spy final : public Interface {
 public:
  Spy(std::string tag, std::vector<std::string>* log) : tag_(std::move(tag)), log_(log) {}
  std::string name() const override { return "spy-" + tag_; }

 protected:
  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) override {
    log_->push_back(tag_);
    return {obs, rewards};
  }
  Bundle do_act_trans(const Bundle& a) override {
    log_->push_back(tag_);
    return a;
  }

 private:
  std::string tag_;
  std::vector<std::string>* log_;
};

inline InterfacePtr spy(std::string tag, std::vector<std::string>* log) {
  return std::make_unique<Spy>(std::move(tag), log);
}

// Per-slot affine maps on vector observations, rewards and vector actions.
// Affine maps do not commute, so composition order is visible in the output.
class Affine final : public SlotwiseInterface {
 public:
  Affine(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {}
  std::string name() const override { return "affine"; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t, const SpaceSpec& s) override {
    return SpaceSpec::box(s.shape(), a_ * s.low() + b_, a_ * s.high() + b_);
  }
  // Outer actions x map to inner (x - d) / c; the outer box is the preimage.
  SpaceSpec outer_act_spec(std::size_t, const SpaceSpec& s) override {
    return SpaceSpec::box(s.shape(), c_ * s.low() + d_, c_ * s.high() + d_);
  }
  Value obs(std::size_t, const Value& v) override {
    auto xs = v.entries();
    for (auto& x : xs) x = a_ * x + b_;
    return Value::vector(xs);
  }
  double reward(std::size_t, double r) override { return a_ * r - b_; }
  Value act(std::size_t, const Value& v) override {
    auto xs = v.entries();
    for (auto& x : xs) x = (x - d_) / c_;
    return Value::vector(xs);
  }

 private:
  double a_, b_, c_, d_;
};

// Dyadic coefficients keep every round trip exact, so actions never leave
// their box by rounding.
inline InterfacePtr affine(RngStream& rng) {
  constexpr double scales[] = {0.5, 1.0, 2.0, 4.0};
  constexpr double shifts[] = {-1.0, -0.5, 0.25, 0.75};
  return std::make_unique<Affine>(scales[rng.below(4)], shifts[rng.below(4)], scales[rng.below(4)], shifts[rng.below(4)]);
}

// Inner specs of n slots, each with a vector observation and action.
inline Specs vector_specs(std::size_t n, std::size_t len = 2) {
  Specs s;
  for (std::size_t i = 0; i < n; ++i) {
    s.obs.push_back(SpaceSpec::vector(len, -4.0, 4.0));
    s.act.push_back(SpaceSpec::vector(len, -4.0, 4.0));
  }
  return s;
}

inline Bundle sample_bundle(const std::vector<SpaceSpec>& specs, RngStream& rng) {
  Bundle b;
  for (const auto& s : specs) b.push_back(space_sample(s, rng));
  return b;
}

// Sets both interfaces up on `inner` and drives them with the same random
// observations, rewards and outer actions; true iff every output matches
// bitwise.
inline bool same_behaviour(Interface& x, Interface& y, const Specs& inner, RngStream& rng, int steps = 5) {
  const Specs& ox = x.setup(inner);
  const Specs& oy = y.setup(inner);
  if (!(ox.obs == oy.obs) || !(ox.act == oy.act)) return false;
  const Bundle first = sample_bundle(inner.obs, rng);
  if (x.reset(first) != y.reset(first)) return false;
  for (int t = 0; t < steps; ++t) {
    const Bundle obs = sample_bundle(inner.obs, rng);
    std::vector<double> rewards;
    for (std::size_t i = 0; i < obs.size(); ++i) rewards.push_back(rng.uniform(-2, 2));
    const Observed a = x.obs_trans(obs, rewards);
    const Observed b = y.obs_trans(obs, rewards);
    if (a.obs != b.obs || a.rewards != b.rewards) return false;
    const Bundle act = sample_bundle(ox.act, rng);
    if (x.act_trans(act) != y.act_trans(act)) return false;
  }
  return true;
}

}  // namespace testkit
