#include "arena/core/rng.hpp"

#include <limits>
#include <stdexcept>

namespace arena {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t derive(std::uint64_t seed, const std::vector<std::string>& path) {
  std::uint64_t h = splitmix64(seed);
  for (const auto& label : path) {
    // Length prefix keeps ["ab","c"] and ["a","bc"] apart.
    h = splitmix64(h ^ (0xa0761d6478bd642fULL + label.size()));
    for (unsigned char c : label) h = splitmix64(h ^ c);
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::vector<std::string> path)
    : seed_(seed), path_(std::move(path)), engine_(derive(seed_, path_)) {}

RngStream RngStream::child(std::string_view label) const {
  auto p = path_;
  p.emplace_back(label);
  return RngStream(seed_, std::move(p));
}

RngStream RngStream::child(std::string_view label, std::uint64_t index) const {
  return child(std::string(label) + "/" + std::to_string(index));
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::below requires n > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("RngStream::uniform_int requires lo <= hi");
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) return static_cast<std::int64_t>(engine_());
  return lo + static_cast<std::int64_t>(below(span + 1));
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return lo + (hi - lo) * uniform01();
}

}  // namespace arena
