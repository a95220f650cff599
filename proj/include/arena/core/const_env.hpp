#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "arena/core/env.hpp"

namespace arena {

// Trivial environment: every slot always observes DiscreteV(0) and receives
// reward 0; the episode ends after `length` steps.
class ConstEnv final : public Env {
 public:
  explicit ConstEnv(std::size_t slots = 1, std::size_t length = 1, std::int64_t actions = 1);

  std::string name() const override { return "const"; }
  const std::vector<SpaceSpec>& observation_specs() const override { return obs_specs_; }
  const std::vector<SpaceSpec>& action_specs() const override { return act_specs_; }
  void write_state(StateHasher& h) const override;

 protected:
  Bundle do_reset(std::uint64_t seed) override;
  StepResult do_step(const Bundle& actions) override;

 private:
  std::size_t slots_;
  std::size_t length_;
  std::size_t t_ = 0;
  Bundle last_actions_;
  std::vector<SpaceSpec> obs_specs_;
  std::vector<SpaceSpec> act_specs_;
};

}  // namespace arena
