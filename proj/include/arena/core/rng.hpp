#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

// Deterministic random stream identified by (seed, label path).
//
// child("board") derives a new stream from the seed and the extended path
// only, so the numbers a consumer sees never depend on how much any sibling or
// parent stream has been drawn. The engine is std::mt19937_64 (fully specified
// by the standard); distributions are implemented here so that sequences are
// identical across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::vector<std::string> path = {});

  RngStream child(std::string_view label) const;
  RngStream child(std::string_view label, std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& path() const { return path_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01();
  double uniform(double lo, double hi);
  bool bernoulli(double p) { return uniform01() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::vector<std::string> path_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace arena
