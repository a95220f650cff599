#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arena/core/agent.hpp"
#include "arena/core/env.hpp"
#include "arena/interface/interface.hpp"

namespace arena {

// An environment seen through an interface: exposes the interface's outer
// spaces, and routes actions through act_trans and observations/rewards
// through obs_trans inside step(). State hashes, rendering and step observers
// all refer to the base environment.
class WrappedEnv final : public Env {
 public:
  WrappedEnv(std::unique_ptr<Env> base, InterfacePtr itf);

  std::string name() const override;
  const std::vector<SpaceSpec>& observation_specs() const override { return itf_->outer_specs().obs; }
  const std::vector<SpaceSpec>& action_specs() const override { return itf_->outer_specs().act; }
  std::vector<std::vector<std::size_t>> teams() const override;

  void write_state(StateHasher& h) const override { base_->write_state(h); }
  std::uint64_t state_hash() const override { return base_->state_hash(); }
  std::string render() const override { return base_->render(); }
  void set_observer(StepObserver* observer) override { base_->set_observer(observer); }

  Env& base() { return *base_; }
  const Env& base() const { return *base_; }
  Interface& interface() { return *itf_; }
  const Interface& interface() const { return *itf_; }

 protected:
  Bundle do_reset(std::uint64_t seed) override;
  StepResult do_step(const Bundle& actions) override;

 private:
  std::unique_ptr<Env> base_;
  InterfacePtr itf_;
};

// Agents seen through an interface: the team accepts raw observations for the
// slots it covers, feeds member k the interface's outer slot(s) for k, and
// returns raw actions. Each member receives the transformed reward of its
// outer slot.
//
// The first step() after reset() must carry the reset observation; it is not
// transformed a second time, so the interface sees the same call sequence as
// it would when wrapped on the environment.
class WrappedAgent final : public Agent {
 public:
  WrappedAgent(std::vector<AgentPtr> members, InterfacePtr itf);

  std::string name() const override;
  std::size_t slot_count() const override;

  void setup(const std::vector<SpaceSpec>& obs_specs,
             const std::vector<SpaceSpec>& act_specs) override;
  void reset(const Bundle& first_obs) override;
  Bundle step(const Bundle& obs, const std::vector<double>& rewards, bool done) override;

  Interface& interface() { return *itf_; }
  std::size_t member_count() const { return members_.size(); }

 private:
  Bundle members_act(const Bundle& outer_obs, const std::vector<double>& rewards, bool done);

  std::vector<AgentPtr> members_;
  InterfacePtr itf_;
  std::size_t outer_slots_ = 0;
  SlotPartition member_partition_{{{0}}};
  Bundle first_outer_obs_;
  bool first_step_ = false;
};

std::unique_ptr<WrappedEnv> wrap_env(std::unique_ptr<Env> env, InterfacePtr itf);

// One single-slot interface per env slot; equivalent to
// wrap_env(env, combine(identity(), itfs, singletons)). Throws SetupError when
// the count differs from the env slot count.
std::unique_ptr<WrappedEnv> wrap_env_per_agent(std::unique_ptr<Env> env, std::vector<InterfacePtr> itfs);

std::unique_ptr<WrappedAgent> wrap_agent(std::vector<AgentPtr> members, InterfacePtr itf);

// A classic single-agent wrapper: transforms for one slot's observation,
// reward and action. Unset members leave that channel unchanged.
struct SlotWrapper {
  std::string name = "wrapper";
  std::function<SpaceSpec(const SpaceSpec&)> obs_spec;
  std::function<Value(const Value&)> obs;
  std::function<double(double)> reward;
  // Outer action space from the inner one, and the outer->inner mapping.
  std::function<SpaceSpec(const SpaceSpec&)> act_spec;
  std::function<Value(const Value&)> act;
};

// Applies `w` to every slot independently.
InterfacePtr lift_single_wrapper(SlotWrapper w);

// Multiplies every real in the observation (and its bounds) by `factor`;
// discrete parts are untouched. `factor` must be positive.
SlotWrapper scale_obs_wrapper(double factor);
SlotWrapper scale_reward_wrapper(double factor);

}  // namespace arena
