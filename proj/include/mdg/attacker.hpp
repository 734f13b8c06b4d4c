#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdg/game.hpp"
#include "mdg/rng.hpp"
#include "mdg/scenario.hpp"

namespace mdg {

// The six-step attack toward the target file, decomposed into primitive
// actions. Each macro step has a goal predicate; the cursor only advances.
// A step whose required credential has been rotated away is permanently
// infeasible and degrades the policy to NoOp.
class AttackScript {
 public:
  struct Step {
    std::string name;
    std::vector<CredentialId> needs;  // credentials this step must still acquire
    std::function<bool(const WorldState&)> done;
    std::function<std::optional<GameAction>(const WorldState&)> next;
  };

  // The scripted attack for the bundled topology: harvest the FW1 password
  // from the security device, pivot through FW1 to T2's management service,
  // open the server-side port and FW2, then walk S1_web to the file on S2.
  static AttackScript paper_script(const Scenario& scn, ActorId attacker = "attacker");

  GameAction next_action(const WorldState& state);
  std::size_t cursor() const { return cursor_; }
  std::size_t step_count() const { return steps_.size(); }
  bool dead() const { return dead_; }

 private:
  std::vector<Step> steps_;
  std::size_t cursor_ = 0;
  bool dead_ = false;
  ActorId actor_;
};

struct UserProfile {
  ActorId id;
  bool is_attacker = false;
  double ap = 0.3;
  std::uint64_t rng_seed = 0;
  DeviceId home;  // benign users act from their home terminal
};

// Exactly n_attackers attacker profiles plus round(n * (1 - UP) / UP) benign
// profiles, each with an independent rng stream derived from config.seed.
std::vector<UserProfile> spawn_population(const Scenario& scn, const EpisodeConfig& config,
                                          std::uint64_t seed);

// One legal benign action: wander between rooms or browse a credential-free
// service from the home terminal.
GameAction benign_action(const UserProfile& profile, const WorldState& state,
                         const Scenario& scn, Rng& rng);

// Attacker: advance the script with probability profile.ap, else NoOp.
// Benign: a random benign action.
GameAction user_tick(const UserProfile& profile, const WorldState& state,
                     const Scenario& scn, AttackScript& script, Rng& rng);

// Inserts a benign actor into the world: placed in its home room with its
// home terminal under control.
WorldState admit_benign_user(const WorldState& state, const Scenario& scn,
                             const UserProfile& profile);

}  // namespace mdg
