#include "mdg/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mdg {

namespace {

// Next hop on the shortest room path from `from` to `to`.
std::optional<RoomId> next_room_toward(const Topology& topo, const RoomId& from,
                                       const RoomId& to) {
  if (from == to) return std::nullopt;
  std::map<RoomId, RoomId> parent;
  std::deque<RoomId> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    RoomId cur = queue.front();
    queue.pop_front();
    auto it = topo.adjacency.find(cur);
    if (it == topo.adjacency.end()) continue;
    for (const auto& next : it->second) {
      if (parent.count(next)) continue;
      parent[next] = cur;
      if (next == to) {
        RoomId hop = to;
        while (parent[hop] != from) hop = parent[hop];
        return hop;
      }
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

GameAction make_enter(const RoomId& room) {
  GameAction a;
  a.kind = GameAction::Kind::EnterRoom;
  a.room = room;
  return a;
}

GameAction make_access(const DeviceId& src, const DeviceId& dst, const ServiceName& svc,
                       const std::optional<CredentialId>& cred) {
  GameAction a;
  a.kind = GameAction::Kind::AccessService;
  a.src = src;
  a.dst = dst;
  a.service = svc;
  a.credential = cred;
  return a;
}

GameAction make_acl_add(const DeviceId& fw, const DeviceId& src, const DeviceId& dst,
                        const ServiceName& svc) {
  GameAction a;
  a.kind = GameAction::Kind::ModifyAcl;
  a.device = fw;
  a.rule = AclRule{src, dst, svc};
  a.add_rule = true;
  return a;
}

}  // namespace

AttackScript AttackScript::paper_script(const Scenario& scn, ActorId attacker) {
  AttackScript script;
  script.actor_ = attacker;
  const Topology& topo = scn.topo;
  const ActorId who = attacker;

  // Identifier layout of the bundled scenario; validated on construction.
  const DeviceId t1 = "T1", t2 = "T2", fw1 = "FW1", fw2 = "FW2", d1 = "D1";
  const DeviceId s1 = "S1", s2 = "S2";
  for (const DeviceId& d : {t1, t2, fw1, fw2, d1, s1, s2})
    if (!topo.has_device(d))
      throw ScenarioValidationError("paper script expects device '" + d + "'");

  const CredentialId fw1_pw = "FW1_password", t2_mgr = "T2_manager";
  const CredentialId fw2_pw = "FW2_password", s1_pw = "S1_web_password";
  const CredentialId s2_pw = "S2_web_password";

  // Foothold choice: prefer T1, fall back to D1 when T1 has no clear path.
  auto pick_src = [=, &topo](const WorldState& s, const DeviceId& dst,
                             const ServiceName& svc) -> std::optional<DeviceId> {
    for (const DeviceId& cand : {t1, d1}) {
      if (!s.controls(who, cand)) continue;
      auto r = reachable(s, topo, cand, dst, svc);
      if (r && r.value()) return cand;
    }
    return std::nullopt;
  };
  auto any_controlled = [=](const WorldState& s, const DeviceId& dst,
                            const ServiceName& svc) -> std::optional<DeviceId> {
    if (auto src = pick_src(s, dst, svc)) return src;
    for (const DeviceId& cand : {t1, d1})
      if (s.controls(who, cand)) return cand;  // path may need an ACL first
    return std::nullopt;
  };

  auto go_to = [=, &topo](const WorldState& s, const RoomId& room) -> std::optional<GameAction> {
    RoomId cur = s.actor_location.count(who) ? s.actor_location.at(who) : RoomId(kOutsideRoom);
    if (cur == room) return std::nullopt;
    auto hop = next_room_toward(topo, cur, room);
    if (!hop) return std::nullopt;
    return make_enter(*hop);
  };

  auto ensure_control = [=, &topo](const WorldState& s, const DeviceId& dev)
      -> std::optional<GameAction> {
    if (s.controls(who, dev)) return std::nullopt;
    const RoomId& room = topo.devices.at(dev).room;
    if (auto move = go_to(s, room)) return move;
    GameAction a;
    a.kind = GameAction::Kind::ControlDevice;
    a.device = dev;
    return a;
  };

  // Re-establishes a session on a firewall's management service.
  auto ensure_session = [=](const WorldState& s, const DeviceId& fw, const ServiceName& svc,
                            const CredentialId& cred) -> std::optional<GameAction> {
    if (s.has_session(who, fw, svc)) return std::nullopt;
    auto src = pick_src(s, fw, svc);
    if (!src) return std::nullopt;
    return make_access(*src, fw, svc, cred);
  };

  // --- step 1: enter Room 2, take the security device, read the stored password ---
  script.steps_.push_back(Step{
      "harvest_fw1_password",
      {fw1_pw},
      [=](const WorldState& s) { return s.possesses(who, fw1_pw); },
      [=](const WorldState& s) -> std::optional<GameAction> {
        if (auto a = ensure_control(s, d1)) return a;
        return make_access(d1, d1, "D1_store", std::nullopt);
      }});

  // --- step 2: open FW1's management service from T1, allow access to T2 ---
  script.steps_.push_back(Step{
      "open_path_to_t2",
      {fw1_pw},
      [=, &topo](const WorldState& s) {
        auto src = pick_src(s, t2, "T2_manager");
        return src.has_value() && s.possesses(who, t2_mgr);
      },
      [=](const WorldState& s) -> std::optional<GameAction> {
        if (auto a = ensure_control(s, t1)) return a;
        if (auto a = ensure_session(s, fw1, "FW1_mgmt", fw1_pw)) return a;
        if (!s.has_session(who, fw1, "FW1_mgmt")) return std::nullopt;
        auto src = any_controlled(s, t2, "T2_manager");
        if (!src) return std::nullopt;
        if (auto have = pick_src(s, t2, "T2_manager"); !have)
          return make_acl_add(fw1, *src, t2, "T2_manager");
        return std::nullopt;
      }});

  // --- step 3: log into T2's management service, harvest FW2 + S1 passwords ---
  script.steps_.push_back(Step{
      "harvest_fw2_and_s1_passwords",
      {t2_mgr},
      [=](const WorldState& s) {
        return s.possesses(who, fw2_pw) && s.possesses(who, s1_pw);
      },
      [=](const WorldState& s) -> std::optional<GameAction> {
        auto src = pick_src(s, t2, "T2_manager");
        if (!src) {  // defender pulled the rule: re-open the path
          if (auto a = ensure_session(s, fw1, "FW1_mgmt", fw1_pw)) return a;
          auto holder = any_controlled(s, t2, "T2_manager");
          if (!holder || !s.has_session(who, fw1, "FW1_mgmt")) return std::nullopt;
          return make_acl_add(fw1, *holder, t2, "T2_manager");
        }
        return make_access(*src, t2, "T2_manager", t2_mgr);
      }});

  // --- step 4: open the T2-S1 port, log into FW2, allow the web services ---
  script.steps_.push_back(Step{
      "open_server_segment",
      {fw2_pw},
      [=, &topo](const WorldState& s) {
        return s.open_gates.count(make_pair_norm(t2, s1)) &&
               pick_src(s, s1, "S1_web").has_value() &&
               pick_src(s, s2, "S2_web").has_value();
      },
      [=, &topo](const WorldState& s) -> std::optional<GameAction> {
        if (!s.open_gates.count(make_pair_norm(t2, s1))) {
          if (!s.has_session(who, t2, "T2_manager")) {
            auto src = pick_src(s, t2, "T2_manager");
            if (!src) return std::nullopt;
            return make_access(*src, t2, "T2_manager", t2_mgr);
          }
          GameAction a;
          a.kind = GameAction::Kind::EnablePort;
          a.src = t2;
          a.dst = s1;
          return a;
        }
        if (auto a = ensure_session(s, fw2, "FW2_mgmt", fw2_pw)) return a;
        if (!s.has_session(who, fw2, "FW2_mgmt")) return std::nullopt;
        auto src = any_controlled(s, s1, "S1_web");
        if (!src) return std::nullopt;
        if (!pick_src(s, s1, "S1_web"))
          return make_acl_add(fw2, *src, s1, "S1_web");
        if (!pick_src(s, s2, "S2_web"))
          return make_acl_add(fw2, *src, s2, "S2_web");
        return std::nullopt;
      }});

  // --- step 5: browse S1_web, harvest the S2 web password ---
  script.steps_.push_back(Step{
      "harvest_s2_password",
      {s1_pw},
      [=](const WorldState& s) { return s.possesses(who, s2_pw); },
      [=](const WorldState& s) -> std::optional<GameAction> {
        auto src = pick_src(s, s1, "S1_web");
        if (!src) {
          if (auto a = ensure_session(s, fw2, "FW2_mgmt", fw2_pw)) return a;
          auto holder = any_controlled(s, s1, "S1_web");
          if (!holder || !s.has_session(who, fw2, "FW2_mgmt")) return std::nullopt;
          return make_acl_add(fw2, *holder, s1, "S1_web");
        }
        return make_access(*src, s1, "S1_web", s1_pw);
      }});

  // --- step 6: pull the security file off S2 ---
  script.steps_.push_back(Step{
      "exfiltrate_target_file",
      {s2_pw},
      [=](const WorldState& s) { return s.possesses(who, s.target_file); },
      [=](const WorldState& s) -> std::optional<GameAction> {
        auto src = pick_src(s, s2, "S2_web");
        if (!src) {
          if (auto a = ensure_session(s, fw2, "FW2_mgmt", fw2_pw)) return a;
          auto holder = any_controlled(s, s2, "S2_web");
          if (!holder || !s.has_session(who, fw2, "FW2_mgmt")) return std::nullopt;
          return make_acl_add(fw2, *holder, s2, "S2_web");
        }
        return make_access(*src, s2, "S2_web", s2_pw);
      }});

  return script;
}

GameAction AttackScript::next_action(const WorldState& state) {
  GameAction noop;
  if (dead_) return noop;
  while (cursor_ < steps_.size() && steps_[cursor_].done(state)) ++cursor_;
  if (cursor_ >= steps_.size()) return noop;

  // A credential a pending step still needs is gone for good once rotated.
  for (std::size_t i = cursor_; i < steps_.size(); ++i) {
    for (const auto& cred : steps_[i].needs) {
      if (state.rotated.count(cred) && !state.possesses(actor_, cred)) {
        dead_ = true;
        return noop;
      }
    }
  }
  auto action = steps_[cursor_].next(state);
  return action ? *action : noop;
}

std::vector<UserProfile> spawn_population(const Scenario& scn, const EpisodeConfig& config,
                                          std::uint64_t seed) {
  std::vector<UserProfile> out;
  double up = config.user_population_ratio;
  int n_benign = static_cast<int>(
      std::llround(config.n_attackers * (1.0 - up) / up));

  std::vector<DeviceId> terminals;
  for (const auto& [id, dev] : scn.topo.devices)
    if (dev.kind == DeviceKind::Terminal) terminals.push_back(id);

  for (int i = 0; i < config.n_attackers; ++i) {
    UserProfile p;
    p.id = "attacker" + std::to_string(i);
    p.is_attacker = true;
    p.ap = config.attack_probability;
    p.rng_seed = Rng::derive(seed, static_cast<std::uint64_t>(i));
    out.push_back(p);
  }
  for (int i = 0; i < n_benign; ++i) {
    UserProfile p;
    p.id = "user" + std::to_string(i);
    p.ap = 0;
    p.rng_seed = Rng::derive(seed, 0x10000ULL + static_cast<std::uint64_t>(i));
    if (!terminals.empty()) p.home = terminals[i % terminals.size()];
    out.push_back(p);
  }
  return out;
}

WorldState admit_benign_user(const WorldState& state, const Scenario& scn,
                             const UserProfile& profile) {
  WorldState next = state;
  if (profile.home.empty()) {
    next.actor_location[profile.id] = kOutsideRoom;
    return next;
  }
  next.actor_location[profile.id] = scn.topo.devices.at(profile.home).room;
  next.controlled[profile.id].insert(profile.home);
  return next;
}

GameAction benign_action(const UserProfile& profile, const WorldState& state,
                         const Scenario& scn, Rng& rng) {
  GameAction noop;
  if (profile.home.empty()) return noop;

  // Credential-free services reachable from the home terminal.
  std::vector<GameAction> choices;
  for (const auto& [dev, svc_name] : scn.service_pairs()) {
    const Service* svc = scn.topo.devices.at(dev).find_service(svc_name);
    if (svc->required_credential) continue;
    if (!svc->yields.empty()) continue;  // credential stores are not browsing targets
    if (!state.is_up(dev, svc_name)) continue;
    auto r = reachable(state, scn.topo, profile.home, dev, svc_name);
    if (r && r.value()) choices.push_back(make_access(profile.home, dev, svc_name, std::nullopt));
  }
  auto loc = state.actor_location.find(profile.id);
  if (loc != state.actor_location.end()) {
    auto adj = scn.topo.adjacency.find(loc->second);
    if (adj != scn.topo.adjacency.end())
      for (const auto& room : adj->second) choices.push_back(make_enter(room));
  }
  choices.push_back(noop);
  return choices[rng.index(choices.size())];
}

GameAction user_tick(const UserProfile& profile, const WorldState& state,
                     const Scenario& scn, AttackScript& script, Rng& rng) {
  if (profile.is_attacker) {
    if (rng.uniform() < profile.ap) return script.next_action(state);
    return {};
  }
  return benign_action(profile, state, scn, rng);
}

}  // namespace mdg
