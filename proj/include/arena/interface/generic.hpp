#pragma once

#include <functional>
#include <string>

#include "arena/interface/interface.hpp"

namespace arena {

// Replaces each slot's observation by flatten(obs); the outer observation
// space is a box of the flattened length. Actions pass through.
InterfacePtr map_to_vector();

// Each group of slots becomes one outer slot whose observation is the
// concatenation of the members' vector observations and whose action is the
// concatenation of the members' actions (a discrete member contributes one
// entry holding its index). act_trans splits the vector back by member.
InterfacePtr concat_obs_act(SlotPartition partition);

// Each group of slots becomes one outer slot observing SeqV(member obs) and
// acting with SeqV(member actions). Team reward is the sum of member rewards;
// a team is alive while any member is.
InterfacePtr make_team(SlotPartition partition);

// A named feature computed from one slot's observation.
struct Feature {
  std::string key;
  // Space of the feature given the slot's inner observation space.
  std::function<SpaceSpec(const SpaceSpec& inner)> spec;
  std::function<Value(const Value& inner_obs)> compute;
};

// Adds `feature.key` to every slot's mapping observation. Throws SetupError
// if the inner observation is not a mapping or already has the key.
InterfacePtr append_feature(Feature feature, std::string name = "append_feature");

}  // namespace arena
