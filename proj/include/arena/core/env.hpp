#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "arena/core/bundle.hpp"
#include "arena/core/canonical.hpp"
#include "arena/core/space.hpp"

namespace arena {

// Receives every transition of the innermost (raw) environment.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_reset(std::uint64_t seed, const Bundle& obs, std::uint64_t state_hash) = 0;
  virtual void on_step(const Bundle& actions, const StepResult& result, std::uint64_t state_hash) = 0;
};

// Multi-agent environment: one observation, reward, alive flag and action per
// slot; a single global done flag.
//
// reset()/step() enforce the contract shared by every environment: step
// requires a prior reset and a live episode (EpisodeOver otherwise), and each
// action must lie in its slot's action space (SpaceMismatch naming the slot).
// Subclasses implement do_reset()/do_step().
class Env {
 public:
  virtual ~Env() = default;
  Env(const Env&) = delete;
  Env& operator=(const Env&) = delete;

  virtual std::string name() const = 0;
  virtual const std::vector<SpaceSpec>& observation_specs() const = 0;
  virtual const std::vector<SpaceSpec>& action_specs() const = 0;
  std::size_t slot_count() const { return action_specs().size(); }

  // Groups of slots that share a side. Defaults to one group per slot.
  virtual std::vector<std::vector<std::size_t>> teams() const;

  Bundle reset(std::uint64_t seed);
  StepResult step(const Bundle& actions);

  bool started() const { return started_; }
  bool done() const { return done_; }
  // Steps taken since the last reset.
  std::size_t elapsed() const { return elapsed_; }

  // Feeds the canonical state serialization into `h`. Equal states must
  // produce equal byte streams.
  virtual void write_state(StateHasher& h) const = 0;
  virtual std::uint64_t state_hash() const;
  virtual std::string render() const { return {}; }

  // Transitions are reported to `observer` (not owned) after each reset/step.
  virtual void set_observer(StepObserver* observer) { observer_ = observer; }

 protected:
  Env() = default;

  virtual Bundle do_reset(std::uint64_t seed) = 0;
  virtual StepResult do_step(const Bundle& actions) = 0;

 private:
  StepObserver* observer_ = nullptr;
  bool started_ = false;
  bool done_ = false;
  std::size_t elapsed_ = 0;
};

// Throws SpaceMismatch naming the first slot whose value falls outside its
// spec, or if the counts differ.
void check_bundle(const Bundle& b, const std::vector<SpaceSpec>& specs, const char* what);

}  // namespace arena
