#include "arena/core/canonical.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "arena/core/error.hpp"

namespace arena {

void StateHasher::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 0x100000001b3ULL;
  }
}

void StateHasher::u64(std::uint64_t x) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(x >> (8 * i));
  bytes(buf, 8);
}

void StateHasher::f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }

void StateHasher::str(std::string_view s) {
  u64(s.size());
  bytes(s.data(), s.size());
}

void StateHasher::value(const Value& v) {
  u8(static_cast<std::uint8_t>(v.kind()));
  switch (v.kind()) {
    case Value::Kind::Discrete:
      i64(v.index());
      break;
    case Value::Kind::Grid: {
      const auto s = v.shape();
      u64(s.height);
      u64(s.width);
      u64(s.channels);
      [[fallthrough]];
    }
    case Value::Kind::Vector:
      u64(v.entries().size());
      for (double x : v.entries()) f64(x);
      break;
    case Value::Kind::Mapping:
      u64(v.fields().size());
      for (const auto& [k, x] : v.fields()) {
        str(k);
        value(x);
      }
      break;
    case Value::Kind::Seq:
      u64(v.items().size());
      for (const auto& x : v.items()) value(x);
      break;
  }
}

std::uint64_t hash_value(const Value& v) {
  StateHasher h;
  h.value(v);
  return h.digest();
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::uint64_t parse_hex64(std::string_view s) {
  if (s.size() != 16) throw FormatError("hash must be 16 hex digits");
  std::uint64_t x = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else throw FormatError("hash must be lowercase hex");
    x = (x << 4) | static_cast<std::uint64_t>(d);
  }
  return x;
}

namespace {

nlohmann::json real_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw FormatError("expected a real number");
}

nlohmann::json reals_to_json(const std::vector<double>& xs) {
  auto a = nlohmann::json::array();
  for (double x : xs) a.push_back(real_to_json(x));
  return a;
}

std::vector<double> reals_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("expected an array of reals");
  std::vector<double> xs;
  xs.reserve(j.size());
  for (const auto& e : j) xs.push_back(real_from_json(e));
  return xs;
}

}  // namespace

nlohmann::json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Discrete:
      return {{"d", v.index()}};
    case Value::Kind::Vector:
      return {{"v", reals_to_json(v.entries())}};
    case Value::Kind::Grid: {
      const auto s = v.shape();
      return {{"g", {{"shape", {s.height, s.width, s.channels}}, {"v", reals_to_json(v.entries())}}}};
    }
    case Value::Kind::Mapping: {
      auto m = nlohmann::json::object();
      for (const auto& [k, x] : v.fields()) m[k] = value_to_json(x);
      return {{"m", m}};
    }
    case Value::Kind::Seq: {
      auto a = nlohmann::json::array();
      for (const auto& x : v.items()) a.push_back(value_to_json(x));
      return {{"s", a}};
    }
  }
  return nullptr;
}

Value value_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) throw FormatError("value must be a single-key object");
  const std::string tag = j.begin().key();
  const nlohmann::json& body = j.begin().value();
  try {
    if (tag == "d") {
      if (!body.is_number_integer() || body.get<std::int64_t>() < 0) {
        throw FormatError("discrete index must be a non-negative integer");
      }
      return Value::discrete(body.get<std::int64_t>());
    }
    if (tag == "v") return Value::vector(reals_from_json(body));
    if (tag == "g") {
      if (!body.is_object() || !body.contains("shape") || !body.contains("v")) {
        throw FormatError("grid needs shape and v");
      }
      const auto& sh = body.at("shape");
      if (!sh.is_array() || sh.size() != 3) throw FormatError("grid shape must have 3 entries");
      for (const auto& d : sh) {
        if (!d.is_number_unsigned()) throw FormatError("grid shape entries must be unsigned");
      }
      GridShape shape{sh[0].get<std::size_t>(), sh[1].get<std::size_t>(), sh[2].get<std::size_t>()};
      auto xs = reals_from_json(body.at("v"));
      if (xs.size() != shape.size()) throw FormatError("grid entry count does not match shape");
      return Value::grid(shape, std::move(xs));
    }
    if (tag == "m") {
      if (!body.is_object()) throw FormatError("mapping body must be an object");
      std::vector<Value::Field> f;
      for (const auto& [k, x] : body.items()) f.emplace_back(k, value_from_json(x));
      return Value::mapping(std::move(f));
    }
    if (tag == "s") {
      if (!body.is_array()) throw FormatError("sequence body must be an array");
      std::vector<Value> items;
      for (const auto& x : body) items.push_back(value_from_json(x));
      return Value::seq(std::move(items));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed value: ") + e.what());
  }
  throw FormatError("unknown value tag '" + tag + "'");
}

std::string canonical_text(const Value& v) { return value_to_json(v).dump(); }

nlohmann::json spec_to_json(const SpaceSpec& s) {
  switch (s.kind()) {
    case SpaceSpec::Kind::Discrete:
      return {{"discrete", s.n()}};
    case SpaceSpec::Kind::Box:
      return {{"box", {{"shape", s.shape()}, {"low", real_to_json(s.low())}, {"high", real_to_json(s.high())}}}};
    case SpaceSpec::Kind::Mapping: {
      auto m = nlohmann::json::object();
      for (const auto& [k, x] : s.fields()) m[k] = spec_to_json(x);
      return {{"mapping", m}};
    }
    case SpaceSpec::Kind::Seq: {
      auto a = nlohmann::json::array();
      for (const auto& x : s.items()) a.push_back(spec_to_json(x));
      return {{"seq", a}};
    }
  }
  return nullptr;
}

}  // namespace arena
