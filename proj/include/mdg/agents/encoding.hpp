#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mdg/scenario.hpp"

namespace mdg {

// Fixed-length [0,1] feature vector for a world state. Layout, in order:
//   1. one-hot attacker room                     (|rooms|)
//   2. device control bits, attacker then others (2 * |devices|)
//   3. presence bit per candidate ACL rule       (|candidate_acl_rules|)
//   4. attacker possession bits, creds then files(|credentials| + |files|)
//   5. service up/down bits                      (|service pairs|)
//   6. open-gate bits                            (|gated links|)
//   7. normalized slice index t / max_slices     (1)
// The length depends only on the scenario, never on the state.
class StateEncoder {
 public:
  explicit StateEncoder(const Scenario& scn);

  int size() const { return size_; }
  Eigen::VectorXd encode(const WorldState& state, int slice) const;

 private:
  std::vector<RoomId> rooms_;
  std::vector<DeviceId> devices_;
  std::vector<AclRule> acl_rules_;
  std::vector<std::string> possessions_;  // credentials then files
  std::vector<std::pair<DeviceId, ServiceName>> services_;
  std::vector<DevicePair> gates_;
  int max_slices_;
  int size_;
  ActorId attacker_ = "attacker";
};

}  // namespace mdg
