#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arena/core/rng.hpp"
#include "arena/core/value.hpp"

namespace arena {

// Immutable descriptor of the set of admissible Values.
//
//   Discrete(n)            DiscreteV(i) with 0 <= i < n
//   Box([len], lo, hi)     VectorV of length len, every entry in [lo, hi]
//   Box([h, w, c], lo, hi) GridV of that shape, every entry in [lo, hi]
//   Mapping{key: spec}     MappingV with exactly these keys
//   Seq[spec...]           SeqV with matching arity
class SpaceSpec {
 public:
  enum class Kind { Discrete, Box, Mapping, Seq };
  using Field = std::pair<std::string, SpaceSpec>;

  // Discrete(1).
  SpaceSpec();

  // Invalid parameters (n == 0, low > high, shape rank other than 1 or 3)
  // throw ConfigError.
  static SpaceSpec discrete(std::int64_t n);
  static SpaceSpec box(std::vector<std::size_t> shape, double low, double high);
  static SpaceSpec vector(std::size_t len, double low, double high) {
    return box({len}, low, high);
  }
  static SpaceSpec grid(GridShape shape, double low, double high) {
    return box({shape.height, shape.width, shape.channels}, low, high);
  }
  // A one-element box pinned to a single value; used for per-episode constants.
  static SpaceSpec constant(double x) { return box({1}, x, x); }
  static SpaceSpec mapping(std::vector<Field> fields);
  static SpaceSpec seq(std::vector<SpaceSpec> items);

  Kind kind() const;
  bool is_discrete() const { return kind() == Kind::Discrete; }
  bool is_box() const { return kind() == Kind::Box; }
  bool is_mapping() const { return kind() == Kind::Mapping; }
  bool is_seq() const { return kind() == Kind::Seq; }

  std::int64_t n() const;
  const std::vector<std::size_t>& shape() const;
  std::size_t volume() const;  // product of the box shape
  bool is_grid() const { return is_box() && shape().size() == 3; }
  GridShape grid_shape() const;
  double low() const;
  double high() const;
  const std::vector<Field>& fields() const;
  const SpaceSpec* find(std::string_view key) const;
  const SpaceSpec& at(std::string_view key) const;
  const std::vector<SpaceSpec>& items() const;

  SpaceSpec with(std::string key, SpaceSpec s) const;

  friend bool operator==(const SpaceSpec& a, const SpaceSpec& b);

 private:
  struct Node;
  explicit SpaceSpec(std::shared_ptr<const Node> node);
  const Node& node() const;

  std::shared_ptr<const Node> node_;
};

// True iff `v` structurally matches `spec`, every real lies in [low, high]
// (NaN never does) and every discrete index is below n.
bool space_contains(const SpaceSpec& spec, const Value& v);

// Draws a member of `spec`. Boxes with infinite bounds draw from a unit normal
// clipped to the bounds.
Value space_sample(const SpaceSpec& spec, RngStream& rng);

// A fixed member of `spec`: index 0, or the box entry closest to zero.
Value space_default(const SpaceSpec& spec);

// Canonical flattening: mappings by ascending key, sequences in order, grids
// row-major, DiscreteV(i) as the single scalar i.
Value flatten(const Value& v);
// As flatten(v), except DiscreteV(i) under Discrete(n) becomes a one-hot of
// length n. Throws SpaceMismatch if `v` does not match `spec` structurally.
Value flatten(const Value& v, const SpaceSpec& spec);

// Length of flatten(v) for any v in `spec`; one-hot counts discrete as n.
std::size_t flat_size(const SpaceSpec& spec, bool one_hot = false);
// Box covering flatten(v) for every v in `spec`.
SpaceSpec flat_spec(const SpaceSpec& spec, bool one_hot = false);

std::string describe(const SpaceSpec& spec);

}  // namespace arena
