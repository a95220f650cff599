#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "arena/core/env.hpp"
#include "arena/harness/registry.hpp"

namespace arena {

// Replay format (JSON Lines, one object per line, keys sorted):
//   {"type":"header","format":1,"toolkit":..,"match":{..},"episode":k,"seed":s,
//    "slots":n,"initial_hash":"<16 hex>"}
//   {"type":"step","t":i,"actions":[<value>..],"rewards":[..],"done":b,"hash":"<16 hex>"}
//   {"type":"outcome","winner":[slots]|null,"returns":[..],"length":n}
// Actions, rewards and hashes are those of the raw environment.
inline constexpr int kReplayFormat = 1;

// Records the raw transitions of one episode.
class ReplayRecorder final : public StepObserver {
 public:
  ReplayRecorder(Json match, std::size_t episode);

  void on_reset(std::uint64_t seed, const Bundle& obs, std::uint64_t state_hash) override;
  void on_step(const Bundle& actions, const StepResult& result, std::uint64_t state_hash) override;

  const std::string& text() const { return text_; }

 private:
  void line(const Json& j);

  Json match_;
  std::size_t episode_;
  std::string text_;
  std::vector<double> returns_;
  std::size_t t_ = 0;
};

struct ReplayEpisode {
  Json header;
  std::vector<Bundle> actions;
  std::vector<std::uint64_t> hashes;
  std::vector<bool> done;
};

// Parses a replay file; throws FormatError on anything malformed, including
// lines that are not in canonical form.
std::vector<ReplayEpisode> read_replay(std::istream& in);

struct VerifyReport {
  bool ok = true;
  std::size_t episodes = 0;
  std::size_t steps = 0;
  // First divergence, if any.
  std::optional<std::size_t> episode;
  std::optional<std::size_t> step;
  std::string message;
};

// Re-simulates every episode from its header seed and recorded actions and
// compares state hashes. Unknown envs throw RegistryError, malformed files
// FormatError.
VerifyReport verify_replay(std::istream& in, const Registry& registry);

// Builds the raw environment named in a replay header.
std::unique_ptr<Env> env_from_header(const Json& header, const Registry& registry);

}  // namespace arena
