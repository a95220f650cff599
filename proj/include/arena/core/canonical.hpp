#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "arena/core/space.hpp"
#include "arena/core/value.hpp"

namespace arena {

// Streams a canonical little-endian byte serialization into a 64-bit FNV-1a
// hash. Reals are hashed by their IEEE-754 bit pattern, so the digest is the
// same on every platform that uses binary64 doubles.
class StateHasher {
 public:
  void bytes(const void* data, std::size_t n);
  void u8(std::uint8_t x) { bytes(&x, 1); }
  void u64(std::uint64_t x);
  void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }
  void f64(double x);
  void boolean(bool b) { u8(b ? 1 : 0); }
  void str(std::string_view s);
  void value(const Value& v);

  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash_value(const Value& v);
std::string hex64(std::uint64_t x);
// Parses 16 hex digits; throws FormatError otherwise.
std::uint64_t parse_hex64(std::string_view s);

// Canonical JSON form of a Value: a single-key object whose key is the variant
// tag.
//   {"d": 3}
//   {"v": [1.0, 2.5]}
//   {"g": {"shape": [h, w, c], "v": [...]}}
//   {"m": {"key": <value>, ...}}          keys ascending
//   {"s": [<value>, ...]}
// Non-finite reals are written as the strings "nan", "inf" and "-inf".
nlohmann::json value_to_json(const Value& v);
// Throws FormatError on malformed input.
Value value_from_json(const nlohmann::json& j);

// Compact, key-sorted text; equal Values always give equal bytes.
std::string canonical_text(const Value& v);

nlohmann::json spec_to_json(const SpaceSpec& s);

}  // namespace arena
