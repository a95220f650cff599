#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/core/agent.hpp"
#include "arena/core/env.hpp"
#include "arena/interface/interface.hpp"

namespace arena {

using Json = nlohmann::json;

// Reads a JSON params object, remembering which keys were used so that
// leftovers can be reported as typos.
class ParamReader {
 public:
  ParamReader(const Json& params, std::string context);

  double number(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  // The raw JSON under `key`, or null.
  Json raw(const std::string& key);
  // Throws ConfigError naming any key that was never read.
  void finish() const;

 private:
  const Json* get(const std::string& key);

  Json params_;
  std::string context_;
  std::set<std::string> used_;
};

class Registry {
 public:
  using EnvMaker = std::function<std::unique_ptr<Env>(const Json& params)>;
  // `seed` is the agent's private seed for this episode.
  using AgentMaker = std::function<AgentPtr(const Json& params, std::uint64_t seed)>;
  using InterfaceMaker = std::function<InterfacePtr(const Json& params, const Registry& registry)>;

  // Every built-in environment, agent and interface.
  static const Registry& builtin();

  void add_env(std::string name, std::string help, EnvMaker make);
  void add_agent(std::string name, std::string help, AgentMaker make);
  void add_interface(std::string name, std::string help, InterfaceMaker make);

  // Unknown names throw RegistryError; bad params throw ConfigError.
  std::unique_ptr<Env> make_env(const std::string& name, const Json& params = Json::object()) const;
  AgentPtr make_agent(const std::string& name, const Json& params, std::uint64_t seed) const;
  // `spec` is a name or {"name": ..., "params": {...}}.
  InterfacePtr make_interface(const Json& spec) const;
  // A list of interface specs applied innermost first; an empty list or null
  // gives identity().
  InterfacePtr make_pipeline(const Json& specs) const;

  // (name, help) pairs in name order.
  std::vector<std::pair<std::string, std::string>> envs() const;
  std::vector<std::pair<std::string, std::string>> agents() const;
  std::vector<std::pair<std::string, std::string>> interfaces() const;

 private:
  template <class F>
  struct Entry {
    std::string help;
    F make;
  };
  std::map<std::string, Entry<EnvMaker>> envs_;
  std::map<std::string, Entry<AgentMaker>> agents_;
  std::map<std::string, Entry<InterfaceMaker>> interfaces_;
};

// Parses "name" or "name:{json params}" as used on the command line.
Json parse_component(const std::string& text);

}  // namespace arena
