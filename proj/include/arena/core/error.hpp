#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace arena {

// Root of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value does not conform to the space it was checked against. `slot` names
// the offending agent slot when known.
class SpaceMismatch : public Error {
 public:
  explicit SpaceMismatch(const std::string& what,
                         std::optional<std::size_t> slot = std::nullopt)
      : Error(slot ? what + " (slot " + std::to_string(*slot) + ")" : what),
        slot_(slot) {}

  std::optional<std::size_t> slot() const { return slot_; }

 private:
  std::optional<std::size_t> slot_;
};

class EpisodeOver : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class SetupError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace arena
