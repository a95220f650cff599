#include "arena/core/env.hpp"

#include "arena/core/error.hpp"

namespace arena {

void check_bundle(const Bundle& b, const std::vector<SpaceSpec>& specs, const char* what) {
  if (b.size() != specs.size()) {
    throw SpaceMismatch(std::string(what) + ": expected " + std::to_string(specs.size()) +
                        " slots, got " + std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!space_contains(specs[i], b[i])) {
      throw SpaceMismatch(std::string(what) + " " + canonical_text(b[i]) + " is not in " +
                              describe(specs[i]),
                          i);
    }
  }
}

std::vector<std::vector<std::size_t>> Env::teams() const {
  std::vector<std::vector<std::size_t>> t;
  for (std::size_t i = 0; i < slot_count(); ++i) t.push_back({i});
  return t;
}

Bundle Env::reset(std::uint64_t seed) {
  Bundle obs = do_reset(seed);
  started_ = true;
  done_ = false;
  elapsed_ = 0;
  if (obs.size() != slot_count()) throw Error(name() + ": reset returned the wrong slot count");
  if (observer_) observer_->on_reset(seed, obs, state_hash());
  return obs;
}

StepResult Env::step(const Bundle& actions) {
  if (!started_) throw EpisodeOver(name() + ": step called before reset");
  if (done_) throw EpisodeOver(name() + ": step called after the episode ended");
  check_bundle(actions, action_specs(), "action");
  StepResult r = do_step(actions);
  const auto n = slot_count();
  if (r.obs.size() != n || r.rewards.size() != n || r.alive.size() != n) {
    throw Error(name() + ": step returned inconsistent slot counts");
  }
  ++elapsed_;
  done_ = r.done;
  if (observer_) observer_->on_step(actions, r, state_hash());
  return r;
}

std::uint64_t Env::state_hash() const {
  StateHasher h;
  write_state(h);
  return h.digest();
}

}  // namespace arena
