#include "arena/interface/wrappers.hpp"

#include <numeric>

#include "arena/core/error.hpp"

namespace arena {

WrappedEnv::WrappedEnv(std::unique_ptr<Env> base, InterfacePtr itf)
    : base_(std::move(base)), itf_(std::move(itf)) {
  if (!base_ || !itf_) throw SetupError("wrap_env: null environment or interface");
  itf_->setup(Specs{base_->observation_specs(), base_->action_specs()});
}

std::string WrappedEnv::name() const { return base_->name() + "|" + itf_->name(); }

std::vector<std::vector<std::size_t>> WrappedEnv::teams() const {
  if (slot_count() == base_->slot_count()) return base_->teams();
  return Env::teams();
}

Bundle WrappedEnv::do_reset(std::uint64_t seed) { return itf_->reset(base_->reset(seed)); }

StepResult WrappedEnv::do_step(const Bundle& actions) {
  StepResult raw = base_->step(itf_->act_trans(actions));
  Observed o = itf_->obs_trans(raw.obs, raw.rewards);
  StepResult out;
  out.obs = std::move(o.obs);
  out.rewards = std::move(o.rewards);
  out.alive = itf_->alive_trans(raw.alive);
  out.done = raw.done;
  out.info = std::move(raw.info);
  return out;
}

WrappedAgent::WrappedAgent(std::vector<AgentPtr> members, InterfacePtr itf)
    : members_(std::move(members)), itf_(std::move(itf)) {
  if (members_.empty()) throw SetupError("wrap_agent: no member agents");
  if (!itf_) throw SetupError("wrap_agent: null interface");
  std::vector<std::size_t> sizes;
  for (const auto& m : members_) {
    if (!m) throw SetupError("wrap_agent: null member agent");
    sizes.push_back(m->slot_count());
  }
  member_partition_ = SlotPartition::from_sizes(sizes);
  outer_slots_ = member_partition_.slot_count();
}

std::string WrappedAgent::name() const {
  std::string s = itf_->name() + "[";
  for (std::size_t i = 0; i < members_.size(); ++i) s += (i ? "," : "") + members_[i]->name();
  return s + "]";
}

std::size_t WrappedAgent::slot_count() const { return itf_->inner_slot_count(outer_slots_); }

void WrappedAgent::setup(const std::vector<SpaceSpec>& obs_specs,
                         const std::vector<SpaceSpec>& act_specs) {
  const Specs& outer = itf_->setup(Specs{obs_specs, act_specs});
  if (outer.slot_count() != outer_slots_) {
    throw SetupError("wrap_agent: interface " + itf_->name() + " exposes " +
                     std::to_string(outer.slot_count()) + " slots but the members control " +
                     std::to_string(outer_slots_));
  }
  auto obs = member_partition_.split(outer.obs);
  auto act = member_partition_.split(outer.act);
  for (std::size_t k = 0; k < members_.size(); ++k) members_[k]->setup(obs[k], act[k]);
}

void WrappedAgent::reset(const Bundle& first_obs) {
  first_outer_obs_ = itf_->reset(first_obs);
  first_step_ = true;
  auto parts = member_partition_.split(first_outer_obs_);
  for (std::size_t k = 0; k < members_.size(); ++k) members_[k]->reset(parts[k]);
}

Bundle WrappedAgent::members_act(const Bundle& outer_obs, const std::vector<double>& rewards, bool done) {
  auto obs = member_partition_.split(outer_obs);
  auto rew = member_partition_.split(rewards);
  std::vector<Bundle> acts;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    Bundle a = members_[k]->step(obs[k], rew[k], done);
    if (!done && a.size() != members_[k]->slot_count()) {
      throw SpaceMismatch("member " + members_[k]->name() + " returned the wrong number of actions");
    }
    acts.push_back(std::move(a));
  }
  if (done) return {};
  return member_partition_.merge(acts);
}

Bundle WrappedAgent::step(const Bundle& obs, const std::vector<double>& rewards, bool done) {
  Bundle outer_actions;
  if (first_step_ && !done) {
    first_step_ = false;
    outer_actions = members_act(first_outer_obs_, std::vector<double>(outer_slots_, 0.0), false);
  } else {
    first_step_ = false;
    Observed o = itf_->obs_trans(obs, rewards);
    outer_actions = members_act(o.obs, o.rewards, done);
  }
  if (done) {
    Bundle idle;
    for (const auto& s : itf_->inner_specs().act) idle.push_back(space_default(s));
    return idle;
  }
  return itf_->act_trans(outer_actions);
}

std::unique_ptr<WrappedEnv> wrap_env(std::unique_ptr<Env> env, InterfacePtr itf) {
  return std::make_unique<WrappedEnv>(std::move(env), std::move(itf));
}

std::unique_ptr<WrappedEnv> wrap_env_per_agent(std::unique_ptr<Env> env, std::vector<InterfacePtr> itfs) {
  if (!env) throw SetupError("wrap_env_per_agent: null environment");
  if (itfs.size() != env->slot_count()) {
    throw SetupError("wrap_env_per_agent: " + std::to_string(itfs.size()) + " interfaces for " +
                     std::to_string(env->slot_count()) + " slots");
  }
  const auto n = itfs.size();
  return wrap_env(std::move(env), combine(identity(), std::move(itfs), SlotPartition::singletons(n)));
}

std::unique_ptr<WrappedAgent> wrap_agent(std::vector<AgentPtr> members, InterfacePtr itf) {
  return std::make_unique<WrappedAgent>(std::move(members), std::move(itf));
}

namespace {

class Lifted final : public SlotwiseInterface {
 public:
  explicit Lifted(SlotWrapper w) : w_(std::move(w)) {}
  std::string name() const override { return w_.name; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t, const SpaceSpec& s) override { return w_.obs_spec ? w_.obs_spec(s) : s; }
  SpaceSpec outer_act_spec(std::size_t, const SpaceSpec& s) override { return w_.act_spec ? w_.act_spec(s) : s; }
  Value obs(std::size_t, const Value& v) override { return w_.obs ? w_.obs(v) : v; }
  double reward(std::size_t, double r) override { return w_.reward ? w_.reward(r) : r; }
  Value act(std::size_t, const Value& v) override { return w_.act ? w_.act(v) : v; }

 private:
  SlotWrapper w_;
};

Value scale_value(const Value& v, double k) {
  switch (v.kind()) {
    case Value::Kind::Discrete:
      return v;
    case Value::Kind::Vector: {
      auto xs = v.entries();
      for (auto& x : xs) x *= k;
      return Value::vector(std::move(xs));
    }
    case Value::Kind::Grid: {
      auto xs = v.entries();
      for (auto& x : xs) x *= k;
      return Value::grid(v.shape(), std::move(xs));
    }
    case Value::Kind::Mapping: {
      std::vector<Value::Field> f;
      for (const auto& [key, x] : v.fields()) f.emplace_back(key, scale_value(x, k));
      return Value::mapping(std::move(f));
    }
    case Value::Kind::Seq: {
      std::vector<Value> items;
      for (const auto& x : v.items()) items.push_back(scale_value(x, k));
      return Value::seq(std::move(items));
    }
  }
  return v;
}

SpaceSpec scale_spec(const SpaceSpec& s, double k) {
  switch (s.kind()) {
    case SpaceSpec::Kind::Discrete:
      return s;
    case SpaceSpec::Kind::Box:
      return SpaceSpec::box(s.shape(), s.low() * k, s.high() * k);
    case SpaceSpec::Kind::Mapping: {
      std::vector<SpaceSpec::Field> f;
      for (const auto& [key, x] : s.fields()) f.emplace_back(key, scale_spec(x, k));
      return SpaceSpec::mapping(std::move(f));
    }
    case SpaceSpec::Kind::Seq: {
      std::vector<SpaceSpec> items;
      for (const auto& x : s.items()) items.push_back(scale_spec(x, k));
      return SpaceSpec::seq(std::move(items));
    }
  }
  return s;
}

}  // namespace

InterfacePtr lift_single_wrapper(SlotWrapper w) { return std::make_unique<Lifted>(std::move(w)); }

SlotWrapper scale_obs_wrapper(double factor) {
  if (!(factor > 0.0)) throw ConfigError("scale_obs factor must be positive");
  SlotWrapper w;
  w.name = "scale_obs";
  w.obs_spec = [factor](const SpaceSpec& s) { return scale_spec(s, factor); };
  w.obs = [factor](const Value& v) { return scale_value(v, factor); };
  return w;
}

SlotWrapper scale_reward_wrapper(double factor) {
  SlotWrapper w;
  w.name = "scale_reward";
  w.reward = [factor](double r) { return r * factor; };
  return w;
}

}  // namespace arena
