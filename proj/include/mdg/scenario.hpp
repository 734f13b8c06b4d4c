#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mdg/game.hpp"
#include "mdg/world.hpp"

namespace mdg {

struct ScenarioParseError : std::runtime_error {
  int line;
  ScenarioParseError(int line_, const std::string& what)
      : std::runtime_error("parse error (line " + std::to_string(line_) + "): " + what),
        line(line_) {}
};

struct ScenarioValidationError : std::runtime_error {
  int line;
  explicit ScenarioValidationError(const std::string& what, int line_ = 0)
      : std::runtime_error("validation error" +
                           (line_ ? " (line " + std::to_string(line_) + ")" : std::string()) +
                           ": " + what),
        line(line_) {}
};

struct CredentialInfo {
  CredentialId id;
  DeviceId device;
  ServiceName service;
};

struct Scenario {
  std::string name;
  Topology topo;
  WorldState initial;
  RewardModel model;
  EpisodeConfig episode;
  std::vector<CredentialInfo> credentials;  // sorted by id
  std::vector<std::string> files;           // non-credential payloads, sorted

  const CredentialInfo* find_credential(const CredentialId& id) const;
  std::vector<std::pair<DeviceId, ServiceName>> service_pairs() const;  // sorted
};

// Line-oriented scenario document with [rooms], [adjacency], [devices],
// [links], [services], [credentials], [acl], [costs], [terminal_rewards]
// sections. Throws ScenarioParseError / ScenarioValidationError.
Scenario load_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario_file(const std::string& path);

// Enumeration of every representable ACL rule for this scenario: sources are
// all devices plus Any, targets every (device, service) pair plus a per-device
// Any-service wildcard. Order is deterministic (lexicographic).
std::vector<AclRule> candidate_acl_rules(const Scenario& scn);

// The subset of rules the defender's enumerated remove actions cover:
// sources restricted to terminals, security devices and Any; exact services.
std::vector<AclRule> manageable_acl_rules(const Scenario& scn);

// Finite defender action set: NoOp, rotate / restart / audit / cut over the
// scenario enumerations, and ACL-rule removal for each manageable rule.
struct DefenderActionSpace {
  std::vector<GameAction> actions;  // index 0 is NoOp
  std::size_t size() const { return actions.size(); }
  const GameAction& operator[](std::size_t i) const { return actions[i]; }
};
DefenderActionSpace build_defender_actions(const Scenario& scn);

}  // namespace mdg
