#include "arena/core/agent.hpp"

#include "arena/core/error.hpp"

namespace arena {

void SlotAgent::setup(const std::vector<SpaceSpec>& obs_specs,
                      const std::vector<SpaceSpec>& act_specs) {
  if (obs_specs.size() != 1 || act_specs.size() != 1) {
    throw SetupError(name() + " controls a single slot but was given " +
                     std::to_string(act_specs.size()));
  }
  obs_spec_ = obs_specs.front();
  act_spec_ = act_specs.front();
  ready_ = true;
  on_setup();
}

void SlotAgent::reset(const Bundle& first_obs) {
  if (!ready_) throw SetupError(name() + ": reset before setup");
  if (first_obs.size() != 1) throw SpaceMismatch(name() + ": expected one observation");
  on_reset(first_obs.front());
}

Bundle SlotAgent::step(const Bundle& obs, const std::vector<double>& rewards, bool done) {
  if (obs.size() != 1 || rewards.size() != 1) {
    throw SpaceMismatch(name() + ": expected one observation and one reward");
  }
  return {act(obs.front(), rewards.front(), done)};
}

Value RandomAgent::act(const Value&, double, bool) { return space_sample(act_spec(), rng_); }

Value ConstantAgent::act(const Value&, double, bool) { return action_; }

}  // namespace arena
