#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arena {

struct GridShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const { return height * width * channels; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// Immutable observation/action payload.
//
// A Value is one of five variants: a discrete index, a flat vector of reals, a
// row-major (height, width, channels) grid, a string-keyed mapping kept in
// ascending key order, or an ordered sequence of Values. Copies share the
// underlying node, so passing Values around is cheap and thread-safe.
class Value {
 public:
  enum class Kind { Discrete, Vector, Grid, Mapping, Seq };
  using Field = std::pair<std::string, Value>;

  // DiscreteV(0).
  Value();

  static Value discrete(std::int64_t index);
  static Value vector(std::vector<double> entries);
  static Value scalar(double x) { return vector({x}); }
  static Value grid(GridShape shape, std::vector<double> entries);
  static Value zeros(GridShape shape);
  // Fields are sorted by key; a duplicate key throws std::invalid_argument.
  static Value mapping(std::vector<Field> fields);
  static Value seq(std::vector<Value> items);

  Kind kind() const;
  bool is_discrete() const { return kind() == Kind::Discrete; }
  bool is_vector() const { return kind() == Kind::Vector; }
  bool is_grid() const { return kind() == Kind::Grid; }
  bool is_mapping() const { return kind() == Kind::Mapping; }
  bool is_seq() const { return kind() == Kind::Seq; }

  // Accessors throw SpaceMismatch when called on the wrong variant.
  std::int64_t index() const;
  const std::vector<double>& entries() const;  // Vector or Grid
  GridShape shape() const;
  double scalar() const;  // Vector of length 1
  const std::vector<Field>& fields() const;
  const Value* find(std::string_view key) const;
  const Value& at(std::string_view key) const;
  const std::vector<Value>& items() const;

  // Returns a copy of this mapping with `key` added or replaced.
  Value with(std::string key, Value v) const;

  // Structural equality, bitwise on reals.
  friend bool operator==(const Value& a, const Value& b);

 private:
  struct Node;
  explicit Value(std::shared_ptr<const Node> node);
  const Node& node() const;

  std::shared_ptr<const Node> node_;
};

std::string_view kind_name(Value::Kind kind);

}  // namespace arena
