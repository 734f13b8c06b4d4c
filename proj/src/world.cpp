#include "mdg/world.hpp"

#include <algorithm>
#include <deque>

namespace mdg {

const char* to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Terminal: return "terminal";
    case DeviceKind::Firewall: return "firewall";
    case DeviceKind::SecurityDevice: return "security_device";
    case DeviceKind::Router: return "router";
    case DeviceKind::Switch: return "switch";
    case DeviceKind::Server: return "server";
  }
  return "?";
}

std::optional<DeviceKind> device_kind_from_string(const std::string& s) {
  if (s == "terminal") return DeviceKind::Terminal;
  if (s == "firewall") return DeviceKind::Firewall;
  if (s == "security_device") return DeviceKind::SecurityDevice;
  if (s == "router") return DeviceKind::Router;
  if (s == "switch") return DeviceKind::Switch;
  if (s == "server") return DeviceKind::Server;
  return std::nullopt;
}

const char* to_string(OpError e) {
  switch (e) {
    case OpError::NotAdjacent: return "NotAdjacent";
    case OpError::WrongRoom: return "WrongRoom";
    case OpError::Uncontrollable: return "Uncontrollable";
    case OpError::NoSession: return "NoSession";
    case OpError::UnknownRule: return "UnknownRule";
    case OpError::NotControlled: return "NotControlled";
    case OpError::ServiceDown: return "ServiceDown";
    case OpError::UnknownDevice: return "UnknownDevice";
    case OpError::UnknownService: return "UnknownService";
    case OpError::UnknownCredential: return "UnknownCredential";
    case OpError::UnknownAction: return "UnknownAction";
  }
  return "?";
}

const Service* Device::find_service(const ServiceName& name) const {
  for (const auto& s : services)
    if (s.name == name) return &s;
  return nullptr;
}

std::string AclRule::to_string() const {
  return (src ? *src : std::string(kAnyToken)) + "->" + dst + ":" +
         (service ? *service : std::string(kAnyToken));
}

bool Topology::adjacent(const RoomId& a, const RoomId& b) const {
  auto it = adjacency.find(a);
  return it != adjacency.end() && it->second.count(b) > 0;
}

std::vector<DeviceId> Topology::neighbors(const DeviceId& d) const {
  std::vector<DeviceId> out;
  for (const auto& [a, b] : links) {
    if (a == d) out.push_back(b);
    else if (b == d) out.push_back(a);
  }
  return out;
}

namespace {

bool link_usable(const WorldState& state, const Topology& topo,
                 const DeviceId& a, const DeviceId& b) {
  DevicePair p = make_pair_norm(a, b);
  if (state.cut_links.count(p)) return false;
  if (topo.gated_links.count(p) && !state.open_gates.count(p)) return false;
  return true;
}

bool firewall_allows(const WorldState& state, const DeviceId& fw,
                     const DeviceId& src, const DeviceId& dst,
                     const ServiceName& svc) {
  auto it = state.acl.find(fw);
  if (it == state.acl.end()) return false;
  for (const auto& rule : it->second)
    if (rule.matches(src, dst, svc)) return true;
  return false;
}

void touch(WorldState& state, const ActorId& actor, const DeviceId& dev) {
  state.trace.push_back({actor, dev});
}

}  // namespace

OpResult<bool> reachable(const WorldState& state, const Topology& topo,
                         const DeviceId& src, const DeviceId& dst,
                         const ServiceName& service) {
  auto src_it = topo.devices.find(src);
  auto dst_it = topo.devices.find(dst);
  if (src_it == topo.devices.end() || dst_it == topo.devices.end())
    return OpResult<bool>::err(OpError::UnknownDevice);
  if (!dst_it->second.find_service(service))
    return OpResult<bool>::err(OpError::UnknownService);
  if (src == dst) return OpResult<bool>::ok(true);

  // BFS. A transit firewall (neither src nor dst) is traversable only when
  // its ACL allows (src, dst, service); the check is per-node, so plain BFS
  // over admissible nodes is equivalent to path enumeration.
  auto admissible = [&](const DeviceId& node) {
    if (node == src || node == dst) return true;
    if (topo.devices.at(node).kind != DeviceKind::Firewall) return true;
    return firewall_allows(state, node, src, dst, service);
  };

  std::set<DeviceId> seen{src};
  std::deque<DeviceId> queue{src};
  while (!queue.empty()) {
    DeviceId cur = queue.front();
    queue.pop_front();
    for (const auto& next : topo.neighbors(cur)) {
      if (seen.count(next) || !link_usable(state, topo, cur, next)) continue;
      if (next == dst) return OpResult<bool>::ok(true);
      if (!admissible(next)) continue;
      seen.insert(next);
      queue.push_back(next);
    }
  }
  return OpResult<bool>::ok(false);
}

std::optional<OpError> enter_room_in_place(WorldState& state, const Topology& topo,
                                           const ActorId& actor, const RoomId& room) {
  auto loc = state.actor_location.find(actor);
  RoomId cur = loc == state.actor_location.end() ? RoomId(kOutsideRoom) : loc->second;
  if (!topo.adjacent(cur, room)) return OpError::NotAdjacent;
  state.actor_location[actor] = room;
  return std::nullopt;
}

OpResult<WorldState> enter_room(const WorldState& state, const Topology& topo,
                                const ActorId& actor, const RoomId& room) {
  WorldState next = state;
  if (auto e = enter_room_in_place(next, topo, actor, room))
    return OpResult<WorldState>::err(*e);
  return OpResult<WorldState>::ok(std::move(next));
}

std::optional<OpError> control_device_in_place(WorldState& state, const Topology& topo,
                                               const ActorId& actor, const DeviceId& device) {
  auto it = topo.devices.find(device);
  if (it == topo.devices.end()) return OpError::UnknownDevice;
  const Device& dev = it->second;
  if (dev.kind != DeviceKind::Terminal && dev.kind != DeviceKind::SecurityDevice)
    return OpError::Uncontrollable;
  auto loc = state.actor_location.find(actor);
  if (loc == state.actor_location.end() || loc->second != dev.room)
    return OpError::WrongRoom;
  state.controlled[actor].insert(device);
  touch(state, actor, device);
  return std::nullopt;
}

OpResult<WorldState> control_device(const WorldState& state, const Topology& topo,
                                    const ActorId& actor, const DeviceId& device) {
  WorldState next = state;
  if (auto e = control_device_in_place(next, topo, actor, device))
    return OpResult<WorldState>::err(*e);
  return OpResult<WorldState>::ok(std::move(next));
}

std::optional<OpError> modify_acl_in_place(WorldState& state, const Topology& topo,
                                           const ActorId& actor, const DeviceId& firewall,
                                           const AclRule& rule, bool add) {
  auto it = topo.devices.find(firewall);
  if (it == topo.devices.end() || it->second.kind != DeviceKind::Firewall)
    return OpError::UnknownDevice;
  bool session = false;
  for (const auto& svc : it->second.services)
    if (state.has_session(actor, firewall, svc.name)) session = true;
  if (!session) return OpError::NoSession;

  auto table = state.acl.find(firewall);
  if (add) {
    auto& rules = table == state.acl.end() ? state.acl[firewall] : table->second;
    if (std::find(rules.begin(), rules.end(), rule) == rules.end())
      rules.push_back(rule);
  } else {
    if (table == state.acl.end()) return OpError::UnknownRule;
    auto pos = std::find(table->second.begin(), table->second.end(), rule);
    if (pos == table->second.end()) return OpError::UnknownRule;
    table->second.erase(pos);
  }
  touch(state, actor, firewall);
  return std::nullopt;
}

OpResult<WorldState> modify_acl(const WorldState& state, const Topology& topo,
                                const ActorId& actor, const DeviceId& firewall,
                                const AclRule& rule, bool add) {
  WorldState next = state;
  if (auto e = modify_acl_in_place(next, topo, actor, firewall, rule, add))
    return OpResult<WorldState>::err(*e);
  return OpResult<WorldState>::ok(std::move(next));
}

OpResult<AccessResult> access_service_in_place(
    WorldState& state, const Topology& topo, const ActorId& actor,
    const DeviceId& src, const DeviceId& dst, const ServiceName& service,
    const std::optional<CredentialId>& credential) {
  using R = OpResult<AccessResult>;
  auto dst_it = topo.devices.find(dst);
  if (!topo.has_device(src) || dst_it == topo.devices.end())
    return R::err(OpError::UnknownDevice);
  const Service* svc = dst_it->second.find_service(service);
  if (!svc) return R::err(OpError::UnknownService);
  if (!state.controls(actor, src)) return R::err(OpError::NotControlled);
  if (!state.is_up(dst, service)) return R::err(OpError::ServiceDown);

  AccessResult result;
  auto reach = reachable(state, topo, src, dst, service);
  if (!reach.value()) {
    result.reason = "unreachable";
  } else if (svc->required_credential) {
    if (!credential) {
      result.reason = "missing_credential";
    } else if (*credential != *svc->required_credential ||
               !state.possesses(actor, *credential) ||
               state.rotated.count(*credential)) {
      result.reason = "bad_credential";
    } else {
      result.granted = true;
    }
  } else {
    result.granted = true;
  }

  touch(state, actor, src);
  touch(state, actor, dst);
  if (result.granted) {
    state.sessions.insert({actor, dst, service});
    for (const auto& item : svc->yields) {
      if (state.rotated.count(item)) continue;  // stale stored copy, worthless
      state.possessions[actor].insert(item);
      result.yields_granted.push_back(item);
    }
  }
  return R::ok(std::move(result));
}

OpResult<std::pair<WorldState, AccessResult>> access_service(
    const WorldState& state, const Topology& topo, const ActorId& actor,
    const DeviceId& src, const DeviceId& dst, const ServiceName& service,
    const std::optional<CredentialId>& credential) {
  using R = OpResult<std::pair<WorldState, AccessResult>>;
  WorldState next = state;
  auto r = access_service_in_place(next, topo, actor, src, dst, service, credential);
  if (!r) return R::err(r.error());
  return R::ok({std::move(next), std::move(r.value())});
}

std::optional<OpError> enable_port_in_place(WorldState& state, const Topology& topo,
                                            const ActorId& actor, const DeviceId& from,
                                            const DeviceId& to) {
  DevicePair p = make_pair_norm(from, to);
  if (!topo.gated_links.count(p)) return OpError::UnknownDevice;
  auto it = topo.devices.find(from);
  bool session = false;
  for (const auto& svc : it->second.services)
    if (state.has_session(actor, from, svc.name)) session = true;
  if (!session) return OpError::NoSession;
  state.open_gates.insert(p);
  touch(state, actor, from);
  return std::nullopt;
}

OpResult<WorldState> enable_port(const WorldState& state, const Topology& topo,
                                 const ActorId& actor, const DeviceId& from,
                                 const DeviceId& to) {
  WorldState next = state;
  if (auto e = enable_port_in_place(next, topo, actor, from, to))
    return OpResult<WorldState>::err(*e);
  return OpResult<WorldState>::ok(std::move(next));
}

WorldState rotate_credential(const WorldState& state, const CredentialId& cred) {
  WorldState next = state;
  next.rotated.insert(cred);
  for (auto& [actor, items] : next.possessions) items.erase(cred);
  return next;
}

OpResult<WorldState> restart_service(const WorldState& state, const Topology& topo,
                                     const DeviceId& device, const ServiceName& service) {
  auto it = topo.devices.find(device);
  if (it == topo.devices.end())
    return OpResult<WorldState>::err(OpError::UnknownDevice);
  if (!it->second.find_service(service))
    return OpResult<WorldState>::err(OpError::UnknownService);
  WorldState next = state;
  std::erase_if(next.sessions, [&](const auto& s) {
    return std::get<1>(s) == device && std::get<2>(s) == service;
  });
  return OpResult<WorldState>::ok(std::move(next));
}

OpResult<WorldState> cut_traffic(const WorldState& state, const Topology& topo,
                                 const DeviceId& a, const DeviceId& b) {
  DevicePair p = make_pair_norm(a, b);
  if (!topo.links.count(p))
    return OpResult<WorldState>::err(OpError::UnknownDevice);
  WorldState next = state;
  next.cut_links.insert(p);
  return OpResult<WorldState>::ok(std::move(next));
}

}  // namespace mdg
