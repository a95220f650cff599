#include "arena/core/value.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "arena/core/error.hpp"

namespace arena {

struct Value::Node {
  Kind kind = Kind::Discrete;
  std::int64_t index = 0;
  GridShape shape;
  std::vector<double> entries;
  std::vector<Field> fields;
  std::vector<Value> items;
};

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

}  // namespace

Value::Value() {
  static const auto zero = [] {
    auto n = std::make_shared<Node>();
    return std::shared_ptr<const Node>(std::move(n));
  }();
  node_ = zero;
}

Value::Value(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

const Value::Node& Value::node() const { return *node_; }

Value Value::discrete(std::int64_t index) {
  if (index < 0) throw std::invalid_argument("discrete index must be non-negative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Discrete;
  n->index = index;
  return Value(std::move(n));
}

Value Value::vector(std::vector<double> entries) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Vector;
  n->entries = std::move(entries);
  return Value(std::move(n));
}

Value Value::grid(GridShape shape, std::vector<double> entries) {
  if (entries.size() != shape.size()) {
    throw std::invalid_argument("grid entry count " + std::to_string(entries.size()) +
                                " does not match shape volume " +
                                std::to_string(shape.size()));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Grid;
  n->shape = shape;
  n->entries = std::move(entries);
  return Value(std::move(n));
}

Value Value::zeros(GridShape shape) {
  return grid(shape, std::vector<double>(shape.size(), 0.0));
}

Value Value::mapping(std::vector<Field> fields) {
  std::sort(fields.begin(), fields.end(),
            [](const Field& a, const Field& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (fields[i - 1].first == fields[i].first) {
      throw std::invalid_argument("duplicate mapping key '" + fields[i].first + "'");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mapping;
  n->fields = std::move(fields);
  return Value(std::move(n));
}

Value Value::seq(std::vector<Value> items) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Seq;
  n->items = std::move(items);
  return Value(std::move(n));
}

Value::Kind Value::kind() const { return node().kind; }

std::int64_t Value::index() const {
  if (!is_discrete()) throw SpaceMismatch("expected a discrete value");
  return node().index;
}

const std::vector<double>& Value::entries() const {
  if (!is_vector() && !is_grid()) throw SpaceMismatch("expected a vector or grid value");
  return node().entries;
}

GridShape Value::shape() const {
  if (!is_grid()) throw SpaceMismatch("expected a grid value");
  return node().shape;
}

double Value::scalar() const {
  const auto& e = entries();
  if (e.size() != 1) throw SpaceMismatch("expected a length-1 vector");
  return e.front();
}

const std::vector<Value::Field>& Value::fields() const {
  if (!is_mapping()) throw SpaceMismatch("expected a mapping value");
  return node().fields;
}

const Value* Value::find(std::string_view key) const {
  const auto& f = fields();
  auto it = std::lower_bound(f.begin(), f.end(), key,
                             [](const Field& a, std::string_view k) { return a.first < k; });
  if (it == f.end() || it->first != key) return nullptr;
  return &it->second;
}

const Value& Value::at(std::string_view key) const {
  if (const Value* v = find(key)) return *v;
  throw SpaceMismatch("mapping has no key '" + std::string(key) + "'");
}

const std::vector<Value>& Value::items() const {
  if (!is_seq()) throw SpaceMismatch("expected a sequence value");
  return node().items;
}

Value Value::with(std::string key, Value v) const {
  std::vector<Field> f = fields();
  auto it = std::lower_bound(f.begin(), f.end(), key,
                             [](const Field& a, const std::string& k) { return a.first < k; });
  if (it != f.end() && it->first == key) {
    it->second = std::move(v);
  } else {
    f.insert(it, Field{std::move(key), std::move(v)});
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mapping;
  n->fields = std::move(f);
  return Value(std::move(n));
}

bool operator==(const Value& a, const Value& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Value::Kind::Discrete:
      return x.index == y.index;
    case Value::Kind::Vector:
      return same_bits(x.entries, y.entries);
    case Value::Kind::Grid:
      return x.shape == y.shape && same_bits(x.entries, y.entries);
    case Value::Kind::Mapping:
      return x.fields == y.fields;
    case Value::Kind::Seq:
      return x.items == y.items;
  }
  return false;
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::Discrete: return "discrete";
    case Value::Kind::Vector: return "vector";
    case Value::Kind::Grid: return "grid";
    case Value::Kind::Mapping: return "mapping";
    case Value::Kind::Seq: return "seq";
  }
  return "?";
}

}  // namespace arena
