#include "arena/core/const_env.hpp"

#include "arena/core/error.hpp"

namespace arena {

ConstEnv::ConstEnv(std::size_t slots, std::size_t length, std::int64_t actions)
    : slots_(slots), length_(length) {
  if (slots == 0 || length == 0) throw ConfigError("const env needs at least one slot and step");
  obs_specs_.assign(slots, SpaceSpec::discrete(1));
  act_specs_.assign(slots, SpaceSpec::discrete(actions));
}

Bundle ConstEnv::do_reset(std::uint64_t) {
  t_ = 0;
  last_actions_.clear();
  return Bundle(slots_, Value::discrete(0));
}

StepResult ConstEnv::do_step(const Bundle& actions) {
  ++t_;
  last_actions_ = actions;
  StepResult r;
  r.obs.assign(slots_, Value::discrete(0));
  r.rewards.assign(slots_, 0.0);
  r.alive.assign(slots_, true);
  r.done = t_ >= length_;
  return r;
}

void ConstEnv::write_state(StateHasher& h) const {
  h.u64(t_);
  h.u64(last_actions_.size());
  for (const auto& a : last_actions_) h.value(a);
}

}  // namespace arena
