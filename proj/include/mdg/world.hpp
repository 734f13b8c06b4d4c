#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace mdg {

using RoomId = std::string;
using DeviceId = std::string;
using ServiceName = std::string;
using CredentialId = std::string;  // credentials and file ids share one namespace
using ActorId = std::string;

constexpr const char* kOutsideRoom = "outside";
constexpr const char* kAnyToken = "Any";

enum class DeviceKind { Terminal, Firewall, SecurityDevice, Router, Switch, Server };

const char* to_string(DeviceKind kind);
std::optional<DeviceKind> device_kind_from_string(const std::string& s);

struct Service {
  ServiceName name;
  std::optional<CredentialId> required_credential;
  std::vector<std::string> yields;  // credentials or files granted on access
};

struct Device {
  DeviceId id;
  DeviceKind kind;
  RoomId room;
  std::vector<Service> services;

  const Service* find_service(const ServiceName& name) const;
};

// Allow rule; absence of a matching rule means deny. Empty src/service = Any.
struct AclRule {
  std::optional<DeviceId> src;
  DeviceId dst;
  std::optional<ServiceName> service;

  bool matches(const DeviceId& s, const DeviceId& d, const ServiceName& svc) const {
    return (!src || *src == s) && dst == d && (!service || *service == svc);
  }
  bool operator==(const AclRule&) const = default;
  std::string to_string() const;
};

using DevicePair = std::pair<DeviceId, DeviceId>;  // normalized: first < second

inline DevicePair make_pair_norm(DeviceId a, DeviceId b) {
  return a < b ? DevicePair{std::move(a), std::move(b)} : DevicePair{std::move(b), std::move(a)};
}

struct Topology {
  std::set<RoomId> rooms;
  std::map<DeviceId, Device> devices;
  std::set<DevicePair> links;
  std::map<RoomId, std::set<RoomId>> adjacency;
  // Links that are down until opened with enable_port (WorldState.open_gates).
  std::set<DevicePair> gated_links;

  bool has_device(const DeviceId& d) const { return devices.count(d) > 0; }
  bool adjacent(const RoomId& a, const RoomId& b) const;
  std::vector<DeviceId> neighbors(const DeviceId& d) const;
};

struct TraceEntry {
  ActorId actor;
  DeviceId device;
  bool operator==(const TraceEntry&) const = default;
};

struct WorldState {
  std::map<ActorId, RoomId> actor_location;
  std::map<ActorId, std::set<DeviceId>> controlled;
  std::map<DeviceId, std::vector<AclRule>> acl;  // keys are firewalls only
  std::map<ActorId, std::set<std::string>> possessions;
  std::map<std::pair<DeviceId, ServiceName>, bool> service_up;
  // Authenticated sessions (actor, device, service); killed by restart_service.
  std::set<std::tuple<ActorId, DeviceId, ServiceName>> sessions;
  std::set<DevicePair> open_gates;
  std::set<CredentialId> rotated;
  std::set<DevicePair> cut_links;   // traffic cuts for the current slice only
  std::vector<TraceEntry> trace;    // devices touched in the current slice
  std::string target_file;

  bool operator==(const WorldState&) const = default;

  bool possesses(const ActorId& a, const std::string& item) const {
    auto it = possessions.find(a);
    return it != possessions.end() && it->second.count(item) > 0;
  }
  bool controls(const ActorId& a, const DeviceId& d) const {
    auto it = controlled.find(a);
    return it != controlled.end() && it->second.count(d) > 0;
  }
  bool has_session(const ActorId& a, const DeviceId& d, const ServiceName& s) const {
    return sessions.count({a, d, s}) > 0;
  }
  bool is_up(const DeviceId& d, const ServiceName& s) const {
    auto it = service_up.find({d, s});
    return it != service_up.end() && it->second;
  }
};

enum class OpError {
  NotAdjacent,
  WrongRoom,
  Uncontrollable,
  NoSession,
  UnknownRule,
  NotControlled,
  ServiceDown,
  UnknownDevice,
  UnknownService,
  UnknownCredential,
  UnknownAction,
};

const char* to_string(OpError e);

// Minimal expected-like result for world operations: either a value or an
// error; an erroring operation never mutates the input state.
template <typename T>
class OpResult {
 public:
  static OpResult ok(T value) {
    OpResult r;
    r.value_ = std::move(value);
    return r;
  }
  static OpResult err(OpError e) {
    OpResult r;
    r.error_ = e;
    return r;
  }
  bool has_value() const { return value_.has_value(); }
  explicit operator bool() const { return has_value(); }
  const T& value() const { return *value_; }
  T& value() { return *value_; }
  OpError error() const { return *error_; }

 private:
  std::optional<T> value_;
  std::optional<OpError> error_;
};

// --- world operations (functional: a new state is returned, inputs untouched) ---

// True iff a link-path exists src -> dst such that every *transit* firewall on
// the path carries a matching allow rule. src == dst with a local service is
// always reachable. Cut links and closed gates are impassable.
OpResult<bool> reachable(const WorldState& state, const Topology& topo,
                         const DeviceId& src, const DeviceId& dst,
                         const ServiceName& service);

OpResult<WorldState> enter_room(const WorldState& state, const Topology& topo,
                                const ActorId& actor, const RoomId& room);

OpResult<WorldState> control_device(const WorldState& state, const Topology& topo,
                                    const ActorId& actor, const DeviceId& device);

OpResult<WorldState> modify_acl(const WorldState& state, const Topology& topo,
                                const ActorId& actor, const DeviceId& firewall,
                                const AclRule& rule, bool add);

// In-place variants of the actor ops above. They validate against the
// untouched state first, so on error the state is left exactly as it was.
// These exist because copying a WorldState with a large user population per
// action dominates simulation time.
std::optional<OpError> enter_room_in_place(WorldState& state, const Topology& topo,
                                           const ActorId& actor, const RoomId& room);

std::optional<OpError> control_device_in_place(WorldState& state, const Topology& topo,
                                               const ActorId& actor, const DeviceId& device);

std::optional<OpError> modify_acl_in_place(WorldState& state, const Topology& topo,
                                           const ActorId& actor, const DeviceId& firewall,
                                           const AclRule& rule, bool add);

struct AccessResult {
  bool granted = false;
  std::string reason;  // "unreachable" | "bad_credential" | "missing_credential" on denial
  std::vector<std::string> yields_granted;
};

OpResult<std::pair<WorldState, AccessResult>> access_service(
    const WorldState& state, const Topology& topo, const ActorId& actor,
    const DeviceId& src, const DeviceId& dst, const ServiceName& service,
    const std::optional<CredentialId>& credential);

// In-place access. On a denial (AccessResult.granted false) the attempt still
// leaves its audit trace entries, matching the copying variant.
OpResult<AccessResult> access_service_in_place(
    WorldState& state, const Topology& topo, const ActorId& actor,
    const DeviceId& src, const DeviceId& dst, const ServiceName& service,
    const std::optional<CredentialId>& credential);

// Opens the gated link (from, to); requires a session on some service of `from`.
OpResult<WorldState> enable_port(const WorldState& state, const Topology& topo,
                                 const ActorId& actor, const DeviceId& from,
                                 const DeviceId& to);

std::optional<OpError> enable_port_in_place(WorldState& state, const Topology& topo,
                                            const ActorId& actor, const DeviceId& from,
                                            const DeviceId& to);

// Defender maintenance: the credential is re-keyed. Stale copies are purged
// from every actor's possession and stored copies stop being harvestable
// (service yields of a rotated credential grant nothing).
WorldState rotate_credential(const WorldState& state, const CredentialId& cred);

// Kills all sessions on (device, service).
OpResult<WorldState> restart_service(const WorldState& state, const Topology& topo,
                                     const DeviceId& device, const ServiceName& service);

// Takes the link down for the current slice.
OpResult<WorldState> cut_traffic(const WorldState& state, const Topology& topo,
                                 const DeviceId& a, const DeviceId& b);

}  // namespace mdg
