#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "arena/core/bundle.hpp"
#include "arena/core/rng.hpp"
#include "arena/core/space.hpp"

namespace arena {

// Decision maker for one or more consecutive env slots. A team is simply an
// Agent with slot_count() > 1: it receives a tuple of observations and returns
// a tuple of actions.
//
// Call order: setup once, then per episode reset followed by step until the
// episode ends. The final step (done == true) reports the terminal
// observation; its returned actions are ignored.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;
  virtual std::size_t slot_count() const { return 1; }

  virtual void setup(const std::vector<SpaceSpec>& obs_specs,
                     const std::vector<SpaceSpec>& act_specs) = 0;
  virtual void reset(const Bundle& first_obs) = 0;
  virtual Bundle step(const Bundle& obs, const std::vector<double>& rewards, bool done) = 0;
};

using AgentPtr = std::unique_ptr<Agent>;

// Adapter for agents that control exactly one slot.
class SlotAgent : public Agent {
 public:
  void setup(const std::vector<SpaceSpec>& obs_specs,
             const std::vector<SpaceSpec>& act_specs) final;
  void reset(const Bundle& first_obs) final;
  Bundle step(const Bundle& obs, const std::vector<double>& rewards, bool done) final;

  const SpaceSpec& obs_spec() const { return obs_spec_; }
  const SpaceSpec& act_spec() const { return act_spec_; }

 protected:
  virtual void on_setup() {}
  virtual void on_reset(const Value& /*first_obs*/) {}
  virtual Value act(const Value& obs, double reward, bool done) = 0;

 private:
  SpaceSpec obs_spec_;
  SpaceSpec act_spec_;
  bool ready_ = false;
};

// Uniform samples from the action space.
class RandomAgent final : public SlotAgent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed, {"random-agent"}) {}
  std::string name() const override { return "random"; }

 protected:
  Value act(const Value& obs, double reward, bool done) override;

 private:
  RngStream rng_;
};

// Always emits the same action. The action is not checked against the space;
// the episode runner reports a mismatch against the slot.
class ConstantAgent final : public SlotAgent {
 public:
  explicit ConstantAgent(Value action) : action_(std::move(action)) {}
  std::string name() const override { return "constant"; }

 protected:
  Value act(const Value& obs, double reward, bool done) override;

 private:
  Value action_;
};

}  // namespace arena
