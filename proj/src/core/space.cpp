#include "arena/core/space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "arena/core/error.hpp"

namespace arena {

struct SpaceSpec::Node {
  Kind kind = Kind::Discrete;
  std::int64_t n = 1;
  std::vector<std::size_t> shape;
  double low = 0.0;
  double high = 0.0;
  std::vector<Field> fields;
  std::vector<SpaceSpec> items;
};

SpaceSpec::SpaceSpec() {
  static const std::shared_ptr<const Node> one = std::make_shared<Node>();
  node_ = one;
}

SpaceSpec::SpaceSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

const SpaceSpec::Node& SpaceSpec::node() const { return *node_; }

SpaceSpec SpaceSpec::discrete(std::int64_t n) {
  if (n < 1) throw ConfigError("discrete space needs n >= 1, got " + std::to_string(n));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Discrete;
  node->n = n;
  return SpaceSpec(std::move(node));
}

SpaceSpec SpaceSpec::box(std::vector<std::size_t> shape, double low, double high) {
  if (shape.size() != 1 && shape.size() != 3) {
    throw ConfigError("box shape must have rank 1 or 3");
  }
  if (std::isnan(low) || std::isnan(high) || low > high) {
    throw ConfigError("box bounds must satisfy low <= high");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Box;
  node->shape = std::move(shape);
  node->low = low;
  node->high = high;
  return SpaceSpec(std::move(node));
}

SpaceSpec SpaceSpec::mapping(std::vector<Field> fields) {
  std::sort(fields.begin(), fields.end(),
            [](const Field& a, const Field& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (fields[i - 1].first == fields[i].first) {
      throw ConfigError("duplicate mapping key '" + fields[i].first + "'");
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Mapping;
  node->fields = std::move(fields);
  return SpaceSpec(std::move(node));
}

SpaceSpec SpaceSpec::seq(std::vector<SpaceSpec> items) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Seq;
  node->items = std::move(items);
  return SpaceSpec(std::move(node));
}

SpaceSpec::Kind SpaceSpec::kind() const { return node().kind; }

std::int64_t SpaceSpec::n() const {
  if (!is_discrete()) throw SpaceMismatch("expected a discrete space");
  return node().n;
}

const std::vector<std::size_t>& SpaceSpec::shape() const {
  if (!is_box()) throw SpaceMismatch("expected a box space");
  return node().shape;
}

std::size_t SpaceSpec::volume() const {
  std::size_t v = 1;
  for (auto d : shape()) v *= d;
  return v;
}

GridShape SpaceSpec::grid_shape() const {
  const auto& s = shape();
  if (s.size() != 3) throw SpaceMismatch("expected a grid box space");
  return {s[0], s[1], s[2]};
}

double SpaceSpec::low() const {
  if (!is_box()) throw SpaceMismatch("expected a box space");
  return node().low;
}

double SpaceSpec::high() const {
  if (!is_box()) throw SpaceMismatch("expected a box space");
  return node().high;
}

const std::vector<SpaceSpec::Field>& SpaceSpec::fields() const {
  if (!is_mapping()) throw SpaceMismatch("expected a mapping space");
  return node().fields;
}

const SpaceSpec* SpaceSpec::find(std::string_view key) const {
  const auto& f = fields();
  auto it = std::lower_bound(f.begin(), f.end(), key,
                             [](const Field& a, std::string_view k) { return a.first < k; });
  if (it == f.end() || it->first != key) return nullptr;
  return &it->second;
}

const SpaceSpec& SpaceSpec::at(std::string_view key) const {
  if (const SpaceSpec* s = find(key)) return *s;
  throw SpaceMismatch("mapping space has no key '" + std::string(key) + "'");
}

const std::vector<SpaceSpec>& SpaceSpec::items() const {
  if (!is_seq()) throw SpaceMismatch("expected a sequence space");
  return node().items;
}

SpaceSpec SpaceSpec::with(std::string key, SpaceSpec s) const {
  std::vector<Field> f = fields();
  auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return x.first == key; });
  if (it != f.end()) {
    it->second = std::move(s);
  } else {
    f.emplace_back(std::move(key), std::move(s));
  }
  return mapping(std::move(f));
}

bool operator==(const SpaceSpec& a, const SpaceSpec& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case SpaceSpec::Kind::Discrete:
      return x.n == y.n;
    case SpaceSpec::Kind::Box:
      return x.shape == y.shape && std::bit_cast<std::uint64_t>(x.low) == std::bit_cast<std::uint64_t>(y.low) &&
             std::bit_cast<std::uint64_t>(x.high) == std::bit_cast<std::uint64_t>(y.high);
    case SpaceSpec::Kind::Mapping:
      return x.fields == y.fields;
    case SpaceSpec::Kind::Seq:
      return x.items == y.items;
  }
  return false;
}

namespace {

bool within(const std::vector<double>& xs, double lo, double hi) {
  return std::all_of(xs.begin(), xs.end(), [&](double x) { return x >= lo && x <= hi; });
}

}  // namespace

bool space_contains(const SpaceSpec& spec, const Value& v) {
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete:
      return v.is_discrete() && v.index() < spec.n();
    case SpaceSpec::Kind::Box: {
      const auto& shape = spec.shape();
      if (shape.size() == 1) {
        return v.is_vector() && v.entries().size() == shape[0] &&
               within(v.entries(), spec.low(), spec.high());
      }
      return v.is_grid() && v.shape() == spec.grid_shape() &&
             within(v.entries(), spec.low(), spec.high());
    }
    case SpaceSpec::Kind::Mapping: {
      if (!v.is_mapping()) return false;
      const auto& sf = spec.fields();
      const auto& vf = v.fields();
      if (sf.size() != vf.size()) return false;
      for (std::size_t i = 0; i < sf.size(); ++i) {
        if (sf[i].first != vf[i].first || !space_contains(sf[i].second, vf[i].second)) {
          return false;
        }
      }
      return true;
    }
    case SpaceSpec::Kind::Seq: {
      if (!v.is_seq()) return false;
      const auto& si = spec.items();
      const auto& vi = v.items();
      if (si.size() != vi.size()) return false;
      for (std::size_t i = 0; i < si.size(); ++i) {
        if (!space_contains(si[i], vi[i])) return false;
      }
      return true;
    }
  }
  return false;
}

namespace {

double sample_real(double lo, double hi, RngStream& rng) {
  if (std::isfinite(lo) && std::isfinite(hi)) return rng.uniform(lo, hi);
  // Box-Muller; u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double centre = std::isfinite(lo) ? lo + 1.0 : (std::isfinite(hi) ? hi - 1.0 : 0.0);
  return std::clamp(centre + z, lo, hi);
}

}  // namespace

Value space_sample(const SpaceSpec& spec, RngStream& rng) {
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete:
      return Value::discrete(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.n()))));
    case SpaceSpec::Kind::Box: {
      std::vector<double> xs(spec.volume());
      for (auto& x : xs) x = sample_real(spec.low(), spec.high(), rng);
      if (spec.shape().size() == 1) return Value::vector(std::move(xs));
      return Value::grid(spec.grid_shape(), std::move(xs));
    }
    case SpaceSpec::Kind::Mapping: {
      std::vector<Value::Field> f;
      f.reserve(spec.fields().size());
      for (const auto& [k, s] : spec.fields()) f.emplace_back(k, space_sample(s, rng));
      return Value::mapping(std::move(f));
    }
    case SpaceSpec::Kind::Seq: {
      std::vector<Value> items;
      items.reserve(spec.items().size());
      for (const auto& s : spec.items()) items.push_back(space_sample(s, rng));
      return Value::seq(std::move(items));
    }
  }
  return {};
}

Value space_default(const SpaceSpec& spec) {
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete:
      return Value::discrete(0);
    case SpaceSpec::Kind::Box: {
      const double x = std::clamp(0.0, spec.low(), spec.high());
      std::vector<double> xs(spec.volume(), x);
      if (spec.shape().size() == 1) return Value::vector(std::move(xs));
      return Value::grid(spec.grid_shape(), std::move(xs));
    }
    case SpaceSpec::Kind::Mapping: {
      std::vector<Value::Field> f;
      for (const auto& [k, s] : spec.fields()) f.emplace_back(k, space_default(s));
      return Value::mapping(std::move(f));
    }
    case SpaceSpec::Kind::Seq: {
      std::vector<Value> items;
      for (const auto& s : spec.items()) items.push_back(space_default(s));
      return Value::seq(std::move(items));
    }
  }
  return {};
}

namespace {

void flatten_into(const Value& v, std::vector<double>& out) {
  switch (v.kind()) {
    case Value::Kind::Discrete:
      out.push_back(static_cast<double>(v.index()));
      break;
    case Value::Kind::Vector:
    case Value::Kind::Grid:
      out.insert(out.end(), v.entries().begin(), v.entries().end());
      break;
    case Value::Kind::Mapping:
      for (const auto& [k, x] : v.fields()) flatten_into(x, out);
      break;
    case Value::Kind::Seq:
      for (const auto& x : v.items()) flatten_into(x, out);
      break;
  }
}

void flatten_into(const Value& v, const SpaceSpec& spec, std::vector<double>& out) {
  // Only structure is checked; box bounds do not matter for flattening.
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete: {
      if (!v.is_discrete() || v.index() >= spec.n()) {
        throw SpaceMismatch("flatten: discrete value outside its space");
      }
      const auto base = out.size();
      out.resize(base + static_cast<std::size_t>(spec.n()), 0.0);
      out[base + static_cast<std::size_t>(v.index())] = 1.0;
      break;
    }
    case SpaceSpec::Kind::Box:
      if ((!v.is_vector() && !v.is_grid()) || v.entries().size() != spec.volume()) {
        throw SpaceMismatch("flatten: box value has the wrong shape");
      }
      out.insert(out.end(), v.entries().begin(), v.entries().end());
      break;
    case SpaceSpec::Kind::Mapping: {
      if (!v.is_mapping() || v.fields().size() != spec.fields().size()) {
        throw SpaceMismatch("flatten: mapping keys differ from space");
      }
      const auto& sf = spec.fields();
      const auto& vf = v.fields();
      for (std::size_t i = 0; i < sf.size(); ++i) {
        if (sf[i].first != vf[i].first) throw SpaceMismatch("flatten: mapping keys differ from space");
        flatten_into(vf[i].second, sf[i].second, out);
      }
      break;
    }
    case SpaceSpec::Kind::Seq: {
      if (!v.is_seq() || v.items().size() != spec.items().size()) {
        throw SpaceMismatch("flatten: sequence arity differs from space");
      }
      for (std::size_t i = 0; i < v.items().size(); ++i) {
        flatten_into(v.items()[i], spec.items()[i], out);
      }
      break;
    }
  }
}

void flat_bounds(const SpaceSpec& spec, bool one_hot, double& lo, double& hi, bool& any) {
  auto take = [&](double l, double h) {
    if (!any) {
      lo = l;
      hi = h;
      any = true;
    } else {
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
  };
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete:
      take(0.0, one_hot ? 1.0 : static_cast<double>(spec.n() - 1));
      break;
    case SpaceSpec::Kind::Box:
      if (spec.volume() > 0) take(spec.low(), spec.high());
      break;
    case SpaceSpec::Kind::Mapping:
      for (const auto& [k, s] : spec.fields()) flat_bounds(s, one_hot, lo, hi, any);
      break;
    case SpaceSpec::Kind::Seq:
      for (const auto& s : spec.items()) flat_bounds(s, one_hot, lo, hi, any);
      break;
  }
}

}  // namespace

Value flatten(const Value& v) {
  std::vector<double> out;
  flatten_into(v, out);
  return Value::vector(std::move(out));
}

Value flatten(const Value& v, const SpaceSpec& spec) {
  std::vector<double> out;
  flatten_into(v, spec, out);
  return Value::vector(std::move(out));
}

std::size_t flat_size(const SpaceSpec& spec, bool one_hot) {
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete:
      return one_hot ? static_cast<std::size_t>(spec.n()) : 1;
    case SpaceSpec::Kind::Box:
      return spec.volume();
    case SpaceSpec::Kind::Mapping: {
      std::size_t n = 0;
      for (const auto& [k, s] : spec.fields()) n += flat_size(s, one_hot);
      return n;
    }
    case SpaceSpec::Kind::Seq: {
      std::size_t n = 0;
      for (const auto& s : spec.items()) n += flat_size(s, one_hot);
      return n;
    }
  }
  return 0;
}

SpaceSpec flat_spec(const SpaceSpec& spec, bool one_hot) {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  flat_bounds(spec, one_hot, lo, hi, any);
  return SpaceSpec::vector(flat_size(spec, one_hot), lo, hi);
}

std::string describe(const SpaceSpec& spec) {
  std::ostringstream os;
  switch (spec.kind()) {
    case SpaceSpec::Kind::Discrete:
      os << "Discrete(" << spec.n() << ")";
      break;
    case SpaceSpec::Kind::Box: {
      os << "Box([";
      for (std::size_t i = 0; i < spec.shape().size(); ++i) os << (i ? "," : "") << spec.shape()[i];
      os << "]," << spec.low() << "," << spec.high() << ")";
      break;
    }
    case SpaceSpec::Kind::Mapping: {
      os << "Mapping{";
      bool first = true;
      for (const auto& [k, s] : spec.fields()) {
        os << (first ? "" : ",") << k << ":" << describe(s);
        first = false;
      }
      os << "}";
      break;
    }
    case SpaceSpec::Kind::Seq: {
      os << "Seq[";
      for (std::size_t i = 0; i < spec.items().size(); ++i) os << (i ? "," : "") << describe(spec.items()[i]);
      os << "]";
      break;
    }
  }
  return os.str();
}

}  // namespace arena
