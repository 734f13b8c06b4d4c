#include "mdg/agents/encoding.hpp"

#include <algorithm>

namespace mdg {

StateEncoder::StateEncoder(const Scenario& scn) {
  rooms_.assign(scn.topo.rooms.begin(), scn.topo.rooms.end());
  for (const auto& [id, _] : scn.topo.devices) devices_.push_back(id);
  acl_rules_ = candidate_acl_rules(scn);
  for (const auto& c : scn.credentials) possessions_.push_back(c.id);
  for (const auto& f : scn.files) possessions_.push_back(f);
  services_ = scn.service_pairs();
  gates_.assign(scn.topo.gated_links.begin(), scn.topo.gated_links.end());
  max_slices_ = scn.episode.max_slices;
  size_ = static_cast<int>(rooms_.size() + 2 * devices_.size() + acl_rules_.size() +
                           possessions_.size() + services_.size() + gates_.size() + 1);
}

Eigen::VectorXd StateEncoder::encode(const WorldState& state, int slice) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(size_);
  int at = 0;

  auto loc = state.actor_location.find(attacker_);
  for (std::size_t i = 0; i < rooms_.size(); ++i, ++at)
    if (loc != state.actor_location.end() && loc->second == rooms_[i]) x[at] = 1;

  for (std::size_t i = 0; i < devices_.size(); ++i, ++at)
    if (state.controls(attacker_, devices_[i])) x[at] = 1;
  for (std::size_t i = 0; i < devices_.size(); ++i, ++at) {
    for (const auto& [actor, devs] : state.controlled) {
      if (actor == attacker_) continue;
      if (devs.count(devices_[i])) {
        x[at] = 1;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < acl_rules_.size(); ++i, ++at) {
    for (const auto& [fw, rules] : state.acl) {
      if (std::find(rules.begin(), rules.end(), acl_rules_[i]) != rules.end()) {
        x[at] = 1;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < possessions_.size(); ++i, ++at)
    if (state.possesses(attacker_, possessions_[i])) x[at] = 1;

  for (std::size_t i = 0; i < services_.size(); ++i, ++at)
    if (state.is_up(services_[i].first, services_[i].second)) x[at] = 1;

  for (std::size_t i = 0; i < gates_.size(); ++i, ++at)
    if (state.open_gates.count(gates_[i])) x[at] = 1;

  x[at] = static_cast<double>(slice) / static_cast<double>(max_slices_);
  return x;
}

}  // namespace mdg
