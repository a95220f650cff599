#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "arena/core/agent.hpp"
#include "arena/core/bundle.hpp"
#include "arena/core/canonical.hpp"
#include "arena/core/const_env.hpp"
#include "arena/core/error.hpp"
#include "arena/core/rng.hpp"
#include "arena/core/space.hpp"
#include "arena/core/value.hpp"
#include "arena/envs/pong.hpp"

using namespace arena;

namespace {

Value V(std::vector<double> xs) { return Value::vector(std::move(xs)); }

// A random spec of bounded depth.
SpaceSpec random_spec(RngStream& rng, int depth = 0) {
  const auto pick = depth >= 2 ? rng.below(2) : rng.below(4);
  switch (pick) {
    case 0: return SpaceSpec::discrete(static_cast<std::int64_t>(1 + rng.below(9)));
    case 1: {
      const double lo = rng.uniform(-5, 5);
      if (rng.bernoulli(0.5)) return SpaceSpec::vector(1 + rng.below(4), lo, lo + rng.uniform(0, 3));
      return SpaceSpec::grid({1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(2)}, lo, lo + rng.uniform(0, 3));
    }
    case 2: {
      std::vector<SpaceSpec::Field> f;
      const auto n = 1 + rng.below(3);
      for (std::size_t i = 0; i < n; ++i) f.emplace_back("k" + std::to_string(i), random_spec(rng, depth + 1));
      return SpaceSpec::mapping(std::move(f));
    }
    default: {
      std::vector<SpaceSpec> items;
      const auto n = 1 + rng.below(3);
      for (std::size_t i = 0; i < n; ++i) items.push_back(random_spec(rng, depth + 1));
      return SpaceSpec::seq(std::move(items));
    }
  }
}

}  // namespace

TEST_CASE("space containment boundaries") {
  CHECK(space_contains(SpaceSpec::discrete(9), Value::discrete(8)));
  CHECK_FALSE(space_contains(SpaceSpec::discrete(9), Value::discrete(9)));
  CHECK(space_contains(SpaceSpec::grid({8, 8, 6}, 0, 1), Value::grid({8, 8, 6}, std::vector<double>(384, 0.5))));
  CHECK_FALSE(space_contains(SpaceSpec::grid({8, 8, 6}, 0, 1), Value::grid({8, 8, 6}, std::vector<double>(384, 1.5))));
  CHECK_FALSE(space_contains(SpaceSpec::vector(1, 0, 1), V({std::nan("")})));
  CHECK_FALSE(space_contains(SpaceSpec::vector(2, 0, 1), V({0.5})));
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(SpaceSpec::discrete(0), ConfigError);
  CHECK_THROWS_AS(SpaceSpec::vector(2, 1, 0), ConfigError);
  CHECK_THROWS_AS(SpaceSpec::box({2, 2}, 0, 1), ConfigError);
}

TEST_CASE("values: mapping order and equality") {
  const Value m = Value::mapping({{"b", V({2})}, {"a", V({1})}});
  REQUIRE(m.fields().size() == 2);
  CHECK(m.fields()[0].first == "a");
  CHECK_THROWS_AS(Value::mapping({{"a", V({1})}, {"a", V({2})}}), std::invalid_argument);
  CHECK_THROWS_AS(Value::grid({2, 2, 1}, {1, 2, 3}), std::exception);
  CHECK(Value::scalar(0.0) == Value::scalar(0.0));
  CHECK_FALSE(Value::scalar(0.0) == Value::scalar(-0.0));
  CHECK_THROWS_AS(Value::discrete(1).entries(), SpaceMismatch);
}

TEST_CASE("sampling") {
  RngStream rng(1);
  CHECK(space_sample(SpaceSpec::discrete(1), rng) == Value::discrete(0));
  CHECK(space_sample(SpaceSpec::vector(2, 0, 0), rng) == V({0, 0}));
  RngStream a(42), b(42);
  for (int i = 0; i < 20; ++i) CHECK(space_sample(SpaceSpec::discrete(6), a) == space_sample(SpaceSpec::discrete(6), b));
}

TEST_CASE("property: samples lie in their space") {
  RngStream rng(7, {"prop"});
  for (int i = 0; i < 500; ++i) {
    const SpaceSpec s = random_spec(rng);
    const Value v = space_sample(s, rng);
    CHECK(space_contains(s, v));
    CHECK(space_contains(s, space_default(s)));
    CHECK(flatten(v).entries().size() == flat_size(s));
    CHECK(flatten(v, s).entries().size() == flat_size(s, true));
    CHECK(space_contains(flat_spec(s), flatten(v)));
  }
}

TEST_CASE("flatten order") {
  CHECK(flatten(Value::mapping({{"a", V({1, 2})}, {"b", V({3})}})) == V({1, 2, 3}));
  CHECK(flatten(Value::grid({1, 2, 1}, {5, 7})) == V({5, 7}));
  CHECK(flatten(Value::seq({Value::mapping({{"z", V({1})}}), V({2})})) == V({1, 2}));
  CHECK(flatten(Value::discrete(2), SpaceSpec::discrete(4)) == V({0, 0, 1, 0}));
}

TEST_CASE("flatten golden file") {
  std::ifstream in(std::string(ARENA_TEST_DATA) + "/flatten_golden.json");
  REQUIRE(in);
  const auto cases = nlohmann::json::parse(in);
  REQUIRE(cases.size() >= 4);
  for (const auto& c : cases) {
    INFO(c.at("name").get<std::string>());
    const Value v = value_from_json(c.at("value"));
    CHECK(value_to_json(flatten(v)) == c.at("flat"));
  }
}

TEST_CASE("canonical json round trip") {
  RngStream rng(3);
  for (int i = 0; i < 200; ++i) {
    const Value v = space_sample(random_spec(rng), rng);
    const auto text = canonical_text(v);
    CHECK(canonical_text(value_from_json(nlohmann::json::parse(text))) == text);
    CHECK(value_from_json(value_to_json(v)) == v);
  }
  CHECK(canonical_text(Value::mapping({{"b", Value::discrete(1)}, {"a", V({0.5})}})) ==
        R"({"m":{"a":{"v":[0.5]},"b":{"d":1}}})");
  CHECK_THROWS_AS(value_from_json(nlohmann::json::parse(R"({"x":1})")), FormatError);
  CHECK_THROWS_AS(value_from_json(nlohmann::json::parse(R"({"d":-1})")), FormatError);
  CHECK_THROWS_AS(parse_hex64("xyz"), FormatError);
  CHECK(parse_hex64(hex64(0x0123456789abcdefULL)) == 0x0123456789abcdefULL);
}

TEST_CASE("state hasher is byte-order independent of the host") {
  // FNV-1a over the little-endian encoding of 1: fixed digest.
  StateHasher h;
  h.u64(1);
  StateHasher g;
  const unsigned char le[8] = {1, 0, 0, 0, 0, 0, 0, 0};
  g.bytes(le, 8);
  CHECK(h.digest() == g.digest());
  CHECK(hash_value(V({1.0})) == hash_value(V({1.0})));
  CHECK(hash_value(V({1.0})) != hash_value(Value::discrete(1)));
}

TEST_CASE("rng streams") {
  RngStream a(5, {"x"});
  RngStream b(5, {"x"});
  b.child("other").next_u64();
  CHECK(a.child("board").next_u64() == b.child("board").next_u64());
  CHECK(a.child("agent", 1).next_u64() != a.child("agent", 2).next_u64());
  RngStream r(9);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(3) < 3);
    const auto k = r.uniform_int(-2, 2);
    CHECK((k >= -2 && k <= 2));
    const double u = r.uniform01();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("partitions") {
  const Bundle b{V({1}), V({2}), V({3})};
  const SlotPartition p({{0}, {1, 2}});
  const auto parts = bundle_split(b, p);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == Bundle{V({1})});
  CHECK(parts[1] == Bundle{V({2}), V({3})});
  CHECK(bundle_merge(parts, p) == b);
  CHECK(bundle_split(Bundle{V({1})}, SlotPartition::singletons(1)).size() == 1);
  CHECK_THROWS_AS(SlotPartition({{0}, {0, 1}}), InvalidPartition);
  CHECK_THROWS_AS(SlotPartition({{1}, {0}}), InvalidPartition);
  CHECK_THROWS_AS(SlotPartition({{0}, {}}), InvalidPartition);
  CHECK_THROWS_AS(bundle_split(b, SlotPartition(std::vector<std::vector<std::size_t>>{{0, 1}})), InvalidPartition);
  CHECK(SlotPartition::from_sizes({1, 2}) == p);
  CHECK(p.group_of(2) == 1);

  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::size_t> sizes;
    std::size_t n = 0;
    for (auto k = 1 + rng.below(4); k > 0; --k) {
      sizes.push_back(1 + rng.below(3));
      n += sizes.back();
    }
    Bundle x;
    for (std::size_t s = 0; s < n; ++s) x.push_back(Value::discrete(static_cast<std::int64_t>(rng.below(100))));
    const auto q = SlotPartition::from_sizes(sizes);
    CHECK(bundle_merge(bundle_split(x, q), q) == x);
  }
}

TEST_CASE("const env contract") {
  ConstEnv env;
  CHECK_THROWS_AS(env.step({Value::discrete(0)}), EpisodeOver);
  CHECK(env.reset(3) == Bundle{Value::discrete(0)});
  CHECK_THROWS_AS(env.step({Value::discrete(1)}), SpaceMismatch);
  CHECK_THROWS_AS(env.step({}), SpaceMismatch);
  const auto r = env.step({Value::discrete(0)});
  CHECK(r.rewards == std::vector<double>{0.0});
  CHECK(r.done);
  CHECK_THROWS_AS(env.step({Value::discrete(0)}), EpisodeOver);
}

TEST_CASE("env determinism: equal seeds and actions give equal hashes") {
  auto run = [] {
    pong::PongEnv env;
    env.reset(17);
    RngStream acts(2);
    std::vector<std::uint64_t> hashes;
    for (int t = 0; t < 100 && !env.done(); ++t) {
      env.step({Value::discrete(static_cast<std::int64_t>(acts.below(3))), Value::discrete(static_cast<std::int64_t>(acts.below(3)))});
      hashes.push_back(env.state_hash());
    }
    return hashes;
  };
  CHECK(run() == run());
}

TEST_CASE("agents") {
  RandomAgent r(7);
  r.setup({SpaceSpec::discrete(1)}, {SpaceSpec::discrete(3)});
  r.reset({Value::discrete(0)});
  for (int i = 0; i < 50; ++i) {
    const auto a = r.step({Value::discrete(0)}, {0.0}, false);
    REQUIRE(a.size() == 1);
    CHECK(a[0].index() < 3);
  }
  ConstantAgent c(Value::discrete(1));
  c.setup({SpaceSpec::discrete(1)}, {SpaceSpec::discrete(3)});
  c.reset({Value::discrete(0)});
  CHECK(c.step({Value::discrete(0)}, {0.0}, false) == Bundle{Value::discrete(1)});

  auto actions = [] {
    RandomAgent a(99);
    a.setup({SpaceSpec::discrete(1)}, {SpaceSpec::discrete(6)});
    a.reset({Value::discrete(0)});
    Bundle out;
    for (int i = 0; i < 30; ++i) out.push_back(a.step({Value::discrete(0)}, {0.0}, false)[0]);
    return out;
  };
  CHECK(actions() == actions());

  RandomAgent fresh(1);
  CHECK_THROWS(fresh.reset({Value::discrete(0)}));
}
