#include "arena/interface/generic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arena/core/canonical.hpp"
#include "arena/core/error.hpp"

namespace arena {

namespace {

class MapToVector final : public SlotwiseInterface {
 public:
  std::string name() const override { return "map_to_vector"; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t, const SpaceSpec& inner) override { return flat_spec(inner); }
  Value obs(std::size_t, const Value& v) override { return flatten(v); }
};

std::vector<bool> any_alive(const SlotPartition& p, const std::vector<bool>& alive) {
  std::vector<bool> out;
  for (const auto& g : p.groups()) {
    out.push_back(std::any_of(g.begin(), g.end(), [&](std::size_t i) { return bool(alive[i]); }));
  }
  return out;
}

class ConcatObsAct final : public Interface {
 public:
  explicit ConcatObsAct(SlotPartition partition) : partition_(std::move(partition)) {}

  std::string name() const override { return "concat_obs_act"; }
  std::size_t inner_slot_count(std::size_t) const override { return partition_.slot_count(); }
  std::vector<std::size_t> inner_slots(std::size_t outer) const override { return partition_.group(outer); }

 protected:
  Specs do_setup(const Specs& inner) override {
    if (inner.slot_count() != partition_.slot_count()) {
      throw SetupError("concat_obs_act: partition covers " + std::to_string(partition_.slot_count()) +
                       " slots, inner has " + std::to_string(inner.slot_count()));
    }
    Specs out;
    for (const auto& g : partition_.groups()) {
      std::size_t obs_len = 0, act_len = 0;
      double olo = std::numeric_limits<double>::infinity(), ohi = -olo;
      double alo = olo, ahi = -olo;
      for (auto i : g) {
        const auto& os = inner.obs[i];
        if (!os.is_box() || os.shape().size() != 1) {
          throw SetupError("concat_obs_act: slot " + std::to_string(i) +
                           " observation must be a vector box, got " + describe(os));
        }
        obs_len += os.volume();
        olo = std::min(olo, os.low());
        ohi = std::max(ohi, os.high());
        const auto& as = inner.act[i];
        if (as.is_discrete()) {
          act_len += 1;
          alo = std::min(alo, 0.0);
          ahi = std::max(ahi, static_cast<double>(as.n() - 1));
        } else if (as.is_box() && as.shape().size() == 1) {
          act_len += as.volume();
          alo = std::min(alo, as.low());
          ahi = std::max(ahi, as.high());
        } else {
          throw SetupError("concat_obs_act: slot " + std::to_string(i) +
                           " action must be discrete or a vector box, got " + describe(as));
        }
      }
      out.obs.push_back(SpaceSpec::vector(obs_len, olo, ohi));
      out.act.push_back(SpaceSpec::vector(act_len, alo, ahi));
    }
    return out;
  }

  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) override {
    Observed out;
    for (const auto& g : partition_.groups()) {
      std::vector<double> cat;
      double r = 0.0;
      for (auto i : g) {
        cat.insert(cat.end(), obs[i].entries().begin(), obs[i].entries().end());
        r += rewards[i];
      }
      out.obs.push_back(Value::vector(std::move(cat)));
      out.rewards.push_back(r);
    }
    return out;
  }

  Bundle do_act_trans(const Bundle& outer) override {
    const auto& inner_act = inner_specs().act;
    Bundle out;
    for (std::size_t k = 0; k < partition_.group_count(); ++k) {
      const auto& xs = outer[k].entries();
      std::size_t pos = 0;
      for (auto i : partition_.group(k)) {
        const auto& s = inner_act[i];
        if (s.is_discrete()) {
          const double x = xs[pos++];
          if (x != std::floor(x) || x < 0 || x >= static_cast<double>(s.n())) {
            throw SpaceMismatch("concat_obs_act: entry " + std::to_string(x) +
                                    " is not a valid index for member slot " + std::to_string(i),
                                k);
          }
          out.push_back(Value::discrete(static_cast<std::int64_t>(x)));
        } else {
          std::vector<double> part(xs.begin() + static_cast<std::ptrdiff_t>(pos),
                                   xs.begin() + static_cast<std::ptrdiff_t>(pos + s.volume()));
          pos += s.volume();
          Value v = Value::vector(std::move(part));
          if (!space_contains(s, v)) {
            throw SpaceMismatch("concat_obs_act: member slot " + std::to_string(i) +
                                    " action out of bounds",
                                k);
          }
          out.push_back(std::move(v));
        }
      }
    }
    return out;
  }

  std::vector<bool> do_alive_trans(const std::vector<bool>& alive) const override {
    return any_alive(partition_, alive);
  }

 private:
  SlotPartition partition_;
};

class MakeTeam final : public Interface {
 public:
  explicit MakeTeam(SlotPartition partition) : partition_(std::move(partition)) {}

  std::string name() const override { return "make_team"; }
  std::size_t inner_slot_count(std::size_t) const override { return partition_.slot_count(); }
  std::vector<std::size_t> inner_slots(std::size_t outer) const override { return partition_.group(outer); }

 protected:
  Specs do_setup(const Specs& inner) override {
    if (inner.slot_count() != partition_.slot_count()) {
      throw SetupError("make_team: partition covers " + std::to_string(partition_.slot_count()) +
                       " slots, inner has " + std::to_string(inner.slot_count()));
    }
    Specs out;
    auto obs = partition_.split(inner.obs);
    auto act = partition_.split(inner.act);
    for (std::size_t k = 0; k < partition_.group_count(); ++k) {
      out.obs.push_back(SpaceSpec::seq(obs[k]));
      out.act.push_back(SpaceSpec::seq(act[k]));
    }
    return out;
  }

  Observed do_obs_trans(const Bundle& obs, const std::vector<double>& rewards) override {
    Observed out;
    auto parts = partition_.split(obs);
    auto rew = partition_.split(rewards);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      out.obs.push_back(Value::seq(std::move(parts[k])));
      double r = 0.0;
      for (double x : rew[k]) r += x;
      out.rewards.push_back(r);
    }
    return out;
  }

  Bundle do_act_trans(const Bundle& outer) override {
    std::vector<Bundle> parts;
    for (std::size_t k = 0; k < outer.size(); ++k) {
      if (!outer[k].is_seq() || outer[k].items().size() != partition_.group(k).size()) {
        throw SpaceMismatch("make_team: team action must be a sequence of " +
                                std::to_string(partition_.group(k).size()) + " actions",
                            k);
      }
      parts.push_back(outer[k].items());
    }
    return partition_.merge(parts);
  }

  std::vector<bool> do_alive_trans(const std::vector<bool>& alive) const override {
    return any_alive(partition_, alive);
  }

 private:
  SlotPartition partition_;
};

class AppendFeature final : public SlotwiseInterface {
 public:
  AppendFeature(Feature f, std::string name) : f_(std::move(f)), name_(std::move(name)) {
    if (!f_.spec || !f_.compute) throw SetupError(name_ + ": feature needs spec and compute");
  }

  std::string name() const override { return name_; }

 protected:
  SpaceSpec outer_obs_spec(std::size_t slot, const SpaceSpec& inner) override {
    if (!inner.is_mapping()) {
      throw SetupError(name_ + ": slot " + std::to_string(slot) + " observation is not a mapping");
    }
    if (inner.find(f_.key)) {
      throw SetupError(name_ + ": observation already has key '" + f_.key + "'");
    }
    return inner.with(f_.key, f_.spec(inner));
  }

  Value obs(std::size_t, const Value& v) override { return v.with(f_.key, f_.compute(v)); }

 private:
  Feature f_;
  std::string name_;
};

}  // namespace

InterfacePtr map_to_vector() { return std::make_unique<MapToVector>(); }

InterfacePtr concat_obs_act(SlotPartition partition) {
  return std::make_unique<ConcatObsAct>(std::move(partition));
}

InterfacePtr make_team(SlotPartition partition) {
  return std::make_unique<MakeTeam>(std::move(partition));
}

InterfacePtr append_feature(Feature feature, std::string name) {
  return std::make_unique<AppendFeature>(std::move(feature), std::move(name));
}

}  // namespace arena
