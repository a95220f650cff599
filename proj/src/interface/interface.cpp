#include "arena/interface/interface.hpp"

#include <algorithm>

#include "arena/core/env.hpp"
#include "arena/core/error.hpp"

namespace arena {

void Interface::require_setup(const char* op) const {
  if (!setup_done_) throw SetupError(name() + ": " + op + " before setup");
}

const Specs& Interface::inner_specs() const {
  require_setup("inner_specs");
  return inner_;
}

const Specs& Interface::outer_specs() const {
  require_setup("outer_specs");
  return outer_;
}

const Specs& Interface::setup(const Specs& inner) {
  if (setup_done_) throw SetupError(name() + ": setup called twice");
  if (inner.obs.size() != inner.act.size() || inner.act.empty()) {
    throw SetupError(name() + ": inner observation and action slot counts differ or are zero");
  }
  Specs outer = do_setup(inner);
  if (outer.obs.size() != outer.act.size() || outer.act.empty()) {
    throw SetupError(name() + ": outer observation and action slot counts differ or are zero");
  }
  inner_ = inner;
  outer_ = std::move(outer);
  setup_done_ = true;
  return outer_;
}

Bundle Interface::do_reset(const Bundle& inner_first_obs) {
  return do_obs_trans(inner_first_obs, std::vector<double>(inner_first_obs.size(), 0.0)).obs;
}

Bundle Interface::reset(const Bundle& inner_first_obs) {
  require_setup("reset");
  if (inner_first_obs.size() != inner_.slot_count()) {
    throw SpaceMismatch(name() + ": reset expected " + std::to_string(inner_.slot_count()) +
                        " observations, got " + std::to_string(inner_first_obs.size()));
  }
  Bundle out = do_reset(inner_first_obs);
  if (out.size() != outer_.slot_count()) throw Error(name() + ": reset produced the wrong slot count");
  return out;
}

Observed Interface::obs_trans(const Bundle& obs, const std::vector<double>& rewards) {
  require_setup("obs_trans");
  if (obs.size() != inner_.slot_count() || rewards.size() != inner_.slot_count()) {
    throw SpaceMismatch(name() + ": obs_trans expected " + std::to_string(inner_.slot_count()) +
                        " slots, got " + std::to_string(obs.size()));
  }
  Observed out = do_obs_trans(obs, rewards);
  if (out.obs.size() != outer_.slot_count() || out.rewards.size() != outer_.slot_count()) {
    throw Error(name() + ": obs_trans produced the wrong slot count");
  }
  return out;
}

Bundle Interface::act_trans(const Bundle& outer_actions) {
  require_setup("act_trans");
  check_bundle(outer_actions, outer_.act, (name() + " action").c_str());
  Bundle out = do_act_trans(outer_actions);
  if (out.size() != inner_.slot_count()) throw Error(name() + ": act_trans produced the wrong slot count");
  return out;
}

std::vector<bool> Interface::alive_trans(const std::vector<bool>& inner_alive) const {
  require_setup("alive_trans");
  if (inner_alive.size() != inner_.slot_count()) {
    throw SpaceMismatch(name() + ": alive_trans got the wrong slot count");
  }
  auto out = do_alive_trans(inner_alive);
  if (out.size() != outer_.slot_count()) throw Error(name() + ": alive_trans produced the wrong slot count");
  return out;
}

Specs SlotwiseInterface::do_setup(const Specs& inner) {
  Specs out;
  for (std::size_t i = 0; i < inner.slot_count(); ++i) {
    out.obs.push_back(outer_obs_spec(i, inner.obs[i]));
    out.act.push_back(outer_act_spec(i, inner.act[i]));
  }
  return out;
}

Observed SlotwiseInterface::do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) {
  Observed out;
  out.obs.reserve(obs.size());
  out.rewards.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out.obs.push_back(this->obs(i, obs[i]));
    out.rewards.push_back(reward(i, rewards[i]));
  }
  return out;
}

Bundle SlotwiseInterface::do_act_trans(const Bundle& outer_actions) {
  Bundle out;
  out.reserve(outer_actions.size());
  for (std::size_t i = 0; i < outer_actions.size(); ++i) out.push_back(act(i, outer_actions[i]));
  return out;
}

namespace {

class Identity final : public Interface {
 public:
  std::string name() const override { return "identity"; }
};

class Stacked final : public Interface {
 public:
  Stacked(InterfacePtr outer, InterfacePtr inner) : outer_(std::move(outer)), inner_(std::move(inner)) {
    if (!outer_ || !inner_) throw SetupError("stack: null interface");
  }

  std::string name() const override { return outer_->name() + "(" + inner_->name() + ")"; }

  std::size_t inner_slot_count(std::size_t outer) const override {
    return inner_->inner_slot_count(outer_->inner_slot_count(outer));
  }

  std::vector<std::size_t> inner_slots(std::size_t outer) const override {
    std::vector<std::size_t> out;
    for (auto mid : outer_->inner_slots(outer)) {
      for (auto i : inner_->inner_slots(mid)) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 protected:
  Specs do_setup(const Specs& inner) override {
    const Specs& mid = inner_->setup(inner);
    try {
      return outer_->setup(mid);
    } catch (const SpaceMismatch& e) {
      throw SetupError(outer_->name() + " cannot stack over " + inner_->name() + ": " + e.what());
    }
  }
  Bundle do_reset(const Bundle& first) override { return outer_->reset(inner_->reset(first)); }
  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) override {
    Observed mid = inner_->obs_trans(obs, rewards);
    return outer_->obs_trans(mid.obs, mid.rewards);
  }
  Bundle do_act_trans(const Bundle& outer_actions) override {
    return inner_->act_trans(outer_->act_trans(outer_actions));
  }
  std::vector<bool> do_alive_trans(const std::vector<bool>& alive) const override {
    return outer_->alive_trans(inner_->alive_trans(alive));
  }

 private:
  InterfacePtr outer_;
  InterfacePtr inner_;
};

class Combined final : public Interface {
 public:
  Combined(InterfacePtr base, std::vector<InterfacePtr> children, SlotPartition partition)
      : base_(std::move(base)), children_(std::move(children)), partition_(std::move(partition)),
        outer_partition_(partition_) {
    if (!base_) throw SetupError("combine: null base interface");
    if (children_.size() != partition_.group_count()) {
      throw InvalidPartition("combine: " + std::to_string(children_.size()) + " children for " +
                             std::to_string(partition_.group_count()) + " groups");
    }
    for (const auto& c : children_) {
      if (!c) throw SetupError("combine: null child interface");
    }
  }

  std::string name() const override {
    std::string s = "combine(" + base_->name() + ",[";
    for (std::size_t k = 0; k < children_.size(); ++k) s += (k ? "," : "") + children_[k]->name();
    return s + "])";
  }

  std::size_t inner_slot_count(std::size_t) const override {
    return base_->inner_slot_count(partition_.slot_count());
  }

  std::vector<std::size_t> inner_slots(std::size_t outer) const override {
    const std::size_t k = outer_partition_.group_of(outer);
    const auto& group = partition_.group(k);
    std::vector<std::size_t> out;
    for (auto local : children_[k]->inner_slots(outer - outer_partition_.group(k).front())) {
      for (auto i : base_->inner_slots(group.at(local))) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 protected:
  Specs do_setup(const Specs& inner) override {
    const Specs& mid = base_->setup(inner);
    if (mid.slot_count() != partition_.slot_count()) {
      throw SetupError("combine: base exposes " + std::to_string(mid.slot_count()) +
                       " slots but the partition covers " + std::to_string(partition_.slot_count()));
    }
    auto obs_parts = partition_.split(mid.obs);
    auto act_parts = partition_.split(mid.act);
    std::vector<std::vector<SpaceSpec>> outer_obs, outer_act;
    std::vector<std::size_t> sizes;
    for (std::size_t k = 0; k < children_.size(); ++k) {
      const Specs& s = children_[k]->setup(Specs{obs_parts[k], act_parts[k]});
      outer_obs.push_back(s.obs);
      outer_act.push_back(s.act);
      sizes.push_back(s.slot_count());
    }
    outer_partition_ = SlotPartition::from_sizes(sizes);
    return {outer_partition_.merge(outer_obs), outer_partition_.merge(outer_act)};
  }

  Bundle do_reset(const Bundle& first) override {
    auto parts = partition_.split(base_->reset(first));
    std::vector<Bundle> out;
    for (std::size_t k = 0; k < children_.size(); ++k) out.push_back(children_[k]->reset(parts[k]));
    return outer_partition_.merge(out);
  }

  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) override {
    Observed mid = base_->obs_trans(obs, rewards);
    auto obs_parts = partition_.split(mid.obs);
    auto rew_parts = partition_.split(mid.rewards);
    std::vector<Bundle> out_obs;
    std::vector<std::vector<double>> out_rew;
    for (std::size_t k = 0; k < children_.size(); ++k) {
      Observed o = children_[k]->obs_trans(obs_parts[k], rew_parts[k]);
      out_obs.push_back(std::move(o.obs));
      out_rew.push_back(std::move(o.rewards));
    }
    return {outer_partition_.merge(out_obs), outer_partition_.merge(out_rew)};
  }

  Bundle do_act_trans(const Bundle& outer_actions) override {
    auto parts = outer_partition_.split(outer_actions);
    std::vector<Bundle> mid;
    for (std::size_t k = 0; k < children_.size(); ++k) mid.push_back(children_[k]->act_trans(parts[k]));
    return base_->act_trans(partition_.merge(mid));
  }

  std::vector<bool> do_alive_trans(const std::vector<bool>& alive) const override {
    auto parts = partition_.split(base_->alive_trans(alive));
    std::vector<std::vector<bool>> out;
    for (std::size_t k = 0; k < children_.size(); ++k) out.push_back(children_[k]->alive_trans(parts[k]));
    return outer_partition_.merge(out);
  }

 private:
  InterfacePtr base_;
  std::vector<InterfacePtr> children_;
  SlotPartition partition_;
  SlotPartition outer_partition_;
};

}  // namespace

InterfacePtr identity() { return std::make_unique<Identity>(); }

InterfacePtr stack(InterfacePtr outer, InterfacePtr inner) {
  return std::make_unique<Stacked>(std::move(outer), std::move(inner));
}

InterfacePtr pipeline(std::vector<InterfacePtr> layers) {
  if (layers.empty()) return identity();
  InterfacePtr acc = std::move(layers.front());
  for (std::size_t i = 1; i < layers.size(); ++i) acc = stack(std::move(layers[i]), std::move(acc));
  return acc;
}

InterfacePtr combine(InterfacePtr base, std::vector<InterfacePtr> children, SlotPartition partition) {
  return std::make_unique<Combined>(std::move(base), std::move(children), std::move(partition));
}

}  // namespace arena
