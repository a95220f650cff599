#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "arena/core/bundle.hpp"
#include "arena/core/space.hpp"

namespace arena {

// Per-slot observation and action spaces on one side of an Interface.
struct Specs {
  std::vector<SpaceSpec> obs;
  std::vector<SpaceSpec> act;

  std::size_t slot_count() const { return act.size(); }
};

// Observations and rewards after an inner-to-outer transform.
struct Observed {
  Bundle obs;
  std::vector<double> rewards;
};

// A transform node between an environment ("inner") and its agents ("outer").
//
// Observations and rewards flow inner -> outer through obs_trans(); actions
// flow outer -> inner through act_trans(). setup() is called exactly once and
// returns the outer spaces, which also fix the outer slot count (it may differ
// from the inner one). reset() starts an episode: it clears episode state and
// transforms the first observation.
//
// The public methods check call order and slot counts, then dispatch to the
// protected do_* hooks, whose defaults pass everything through unchanged.
class Interface {
 public:
  virtual ~Interface() = default;

  virtual std::string name() const = 0;

  const Specs& setup(const Specs& inner);
  Bundle reset(const Bundle& inner_first_obs);
  Observed obs_trans(const Bundle& obs, const std::vector<double>& rewards);
  // Throws SpaceMismatch (with the outer slot) for actions outside the outer
  // action spaces.
  Bundle act_trans(const Bundle& outer_actions);
  // Per-slot liveness seen from the outside.
  std::vector<bool> alive_trans(const std::vector<bool>& inner_alive) const;

  // Inner slot count implied by `outer` outer slots. Slot-local interfaces
  // return `outer`; grouping interfaces return their partition size.
  virtual std::size_t inner_slot_count(std::size_t outer) const { return outer; }
  // Inner slots feeding outer slot `outer`, ascending. Valid after setup.
  virtual std::vector<std::size_t> inner_slots(std::size_t outer) const { return {outer}; }

  bool is_setup() const { return setup_done_; }
  const Specs& inner_specs() const;
  const Specs& outer_specs() const;

 protected:
  virtual Specs do_setup(const Specs& inner) { return inner; }
  virtual Bundle do_reset(const Bundle& inner_first_obs);
  virtual Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) {
    return {obs, rewards};
  }
  virtual Bundle do_act_trans(const Bundle& outer_actions) { return outer_actions; }
  virtual std::vector<bool> do_alive_trans(const std::vector<bool>& inner_alive) const {
    return inner_alive;
  }

 private:
  void require_setup(const char* op) const;

  bool setup_done_ = false;
  Specs inner_;
  Specs outer_;
};

using InterfacePtr = std::unique_ptr<Interface>;

// Base for transforms applied to each slot independently. The slot count is
// unchanged; `slot` is the local slot index inside this interface.
class SlotwiseInterface : public Interface {
 protected:
  virtual SpaceSpec outer_obs_spec(std::size_t /*slot*/, const SpaceSpec& inner) { return inner; }
  virtual SpaceSpec outer_act_spec(std::size_t /*slot*/, const SpaceSpec& inner) { return inner; }
  virtual Value obs(std::size_t /*slot*/, const Value& v) { return v; }
  virtual double reward(std::size_t /*slot*/, double r) { return r; }
  virtual Value act(std::size_t /*slot*/, const Value& v) { return v; }

  Specs do_setup(const Specs& inner) final;
  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) final;
  Bundle do_act_trans(const Bundle& outer_actions) final;
};

InterfacePtr identity();

// `outer` stacked over `inner`: observations pass inner then outer, actions
// outer then inner.
InterfacePtr stack(InterfacePtr outer, InterfacePtr inner);

// Stacks a list innermost-first: pipeline({a, b, c}) == stack(c, stack(b, a)).
// An empty list yields identity().
InterfacePtr pipeline(std::vector<InterfacePtr> layers);

// `children` side by side over `base`. Observations go through base, are split
// by `partition` and each group goes through its child; actions take the
// reverse path. Throws InvalidPartition if the child count differs from the
// group count.
InterfacePtr combine(InterfacePtr base, std::vector<InterfacePtr> children,
                     SlotPartition partition);

}  // namespace arena
