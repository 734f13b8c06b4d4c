#include "mdg/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdg {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Captured: return "captured";
    case Outcome::Timeout: return "timeout";
  }
  return "?";
}

const char* GameAction::kind_name(Kind k) {
  switch (k) {
    case Kind::NoOp: return "noop";
    case Kind::EnterRoom: return "enter_room";
    case Kind::ControlDevice: return "control_device";
    case Kind::ModifyAcl: return "modify_acl";
    case Kind::EnablePort: return "enable_port";
    case Kind::AccessService: return "access_service";
    case Kind::CutTraffic: return "cut_traffic";
    case Kind::UseCredential: return "use_credential";
    case Kind::RotateCredential: return "rotate_credential";
    case Kind::RestartService: return "restart_service";
    case Kind::AuditDevice: return "audit_device";
  }
  return "?";
}

std::string GameAction::to_string() const {
  std::string s = kind_name(kind);
  switch (kind) {
    case Kind::NoOp: break;
    case Kind::EnterRoom: s += "(" + room + ")"; break;
    case Kind::ControlDevice:
    case Kind::AuditDevice: s += "(" + device + ")"; break;
    case Kind::ModifyAcl:
      s += std::string("(") + device + "," + (add_rule ? "add" : "remove") + "," +
           rule.to_string() + ")";
      break;
    case Kind::EnablePort:
    case Kind::CutTraffic: s += "(" + src + "," + dst + ")"; break;
    case Kind::AccessService:
      s += "(" + src + "," + dst + "," + service +
           (credential ? "," + *credential : "") + ")";
      break;
    case Kind::UseCredential:
      s += "(" + (credential ? *credential : "?") + "," + dst + "," + service + ")";
      break;
    case Kind::RotateCredential:
      s += "(" + (credential ? *credential : "?") + ")";
      break;
    case Kind::RestartService: s += "(" + device + "," + service + ")"; break;
  }
  return s;
}

namespace {

double lookup(const std::map<std::string, double>& table, const std::string& key) {
  auto it = table.find(key);
  if (it == table.end()) throw std::runtime_error("UnknownAction: " + key);
  return it->second;
}

}  // namespace

double RewardModel::ac(const GameAction& a) const {
  if (a.is_noop()) return 0;
  return lookup(attack_cost, GameAction::kind_name(a.kind));
}

double RewardModel::dc_attack(const GameAction& a, bool harvested) const {
  if (a.is_noop()) return 0;
  if (harvested && a.kind == GameAction::Kind::AccessService) return harvest_damage;
  if (harvested && a.kind == GameAction::Kind::UseCredential) return harvest_damage;
  return lookup(damage_cost, GameAction::kind_name(a.kind));
}

double RewardModel::dc_defense(const GameAction& d) const {
  if (d.is_noop()) return 0;
  return lookup(defense_cost, GameAction::kind_name(d.kind));
}

double attack_reward(double alpha, const GameAction& a, const GameAction& d,
                     const RewardModel& model, bool harvested) {
  return (1.0 - alpha) * model.dc_attack(a, harvested) + model.dc_defense(d) -
         model.ac(a);
}

double defense_reward(double alpha, const GameAction& a, const GameAction& d,
                      const RewardModel& model, bool harvested) {
  // Evaluated as the exact negation of Eq. 3 so AR + DR == 0 holds bitwise.
  return -attack_reward(alpha, a, d, model, harvested);
}

namespace {

// Does the attack action's preconditions hold in this state?
bool precond_holds(const GameAction& a, const WorldState& state,
                   const Topology& topo, const ActorId& actor) {
  switch (a.kind) {
    case GameAction::Kind::NoOp:
      return true;
    case GameAction::Kind::EnterRoom: {
      auto loc = state.actor_location.find(actor);
      RoomId cur = loc == state.actor_location.end() ? RoomId(kOutsideRoom) : loc->second;
      return topo.adjacent(cur, a.room);
    }
    case GameAction::Kind::ControlDevice: {
      auto it = topo.devices.find(a.device);
      if (it == topo.devices.end()) return false;
      if (it->second.kind != DeviceKind::Terminal &&
          it->second.kind != DeviceKind::SecurityDevice)
        return false;
      auto loc = state.actor_location.find(actor);
      return loc != state.actor_location.end() && loc->second == it->second.room;
    }
    case GameAction::Kind::ModifyAcl: {
      auto it = topo.devices.find(a.device);
      if (it == topo.devices.end() || it->second.kind != DeviceKind::Firewall)
        return false;
      for (const auto& svc : it->second.services)
        if (state.has_session(actor, a.device, svc.name)) return true;
      return false;
    }
    case GameAction::Kind::EnablePort: {
      if (!topo.gated_links.count(make_pair_norm(a.src, a.dst))) return false;
      auto it = topo.devices.find(a.src);
      if (it == topo.devices.end()) return false;
      for (const auto& svc : it->second.services)
        if (state.has_session(actor, a.src, svc.name)) return true;
      return false;
    }
    case GameAction::Kind::AccessService: {
      if (!state.controls(actor, a.src)) return false;
      if (!state.is_up(a.dst, a.service)) return false;
      auto dst = topo.devices.find(a.dst);
      if (dst == topo.devices.end()) return false;
      const Service* svc = dst->second.find_service(a.service);
      if (!svc) return false;
      auto reach = reachable(state, topo, a.src, a.dst, a.service);
      if (!reach || !reach.value()) return false;
      if (svc->required_credential) {
        if (!a.credential || *a.credential != *svc->required_credential) return false;
        if (!state.possesses(actor, *a.credential)) return false;
        if (state.rotated.count(*a.credential)) return false;
      }
      return true;
    }
    case GameAction::Kind::UseCredential: {
      if (!a.credential || !state.possesses(actor, *a.credential)) return false;
      if (state.rotated.count(*a.credential)) return false;
      if (!state.is_up(a.dst, a.service)) return false;
      auto ctrl = state.controlled.find(actor);
      if (ctrl == state.controlled.end()) return false;
      for (const auto& src : ctrl->second) {
        auto reach = reachable(state, topo, src, a.dst, a.service);
        if (reach && reach.value()) return true;
      }
      return false;
    }
    default:
      return false;  // defender-only kinds are not attack actions
  }
}

// Applies a defender action's world effect. Illegal defender actions have no
// effect (the slice is wasted, never aborted).
WorldState apply_defense(const GameAction& d, const WorldState& state,
                         const Topology& topo) {
  switch (d.kind) {
    case GameAction::Kind::RotateCredential:
      return d.credential ? rotate_credential(state, *d.credential) : state;
    case GameAction::Kind::RestartService: {
      auto r = restart_service(state, topo, d.device, d.service);
      return r ? r.value() : state;
    }
    case GameAction::Kind::CutTraffic: {
      auto r = cut_traffic(state, topo, d.src, d.dst);
      return r ? r.value() : state;
    }
    case GameAction::Kind::ModifyAcl: {
      // The defender is the administrator: management access is implicit.
      // With no firewall named, a removal strips the rule from every table.
      WorldState next = state;
      if (d.device.empty()) {
        if (d.add_rule) return state;
        for (auto& [fw, rules] : next.acl)
          std::erase(rules, d.rule);
        return next;
      }
      auto it = topo.devices.find(d.device);
      if (it == topo.devices.end() || it->second.kind != DeviceKind::Firewall)
        return state;
      auto& rules = next.acl[d.device];
      if (d.add_rule) {
        if (std::find(rules.begin(), rules.end(), d.rule) == rules.end())
          rules.push_back(d.rule);
      } else {
        std::erase(rules, d.rule);
      }
      return next;
    }
    default:
      return state;  // NoOp / AuditDevice / non-defense kinds: no world effect
  }
}

struct AttackEffect {
  bool landed = false;
  bool harvested = false;
};

// Mutates `state` with a's world effect; illegal actions leave it untouched
// (a denied service access still leaves its audit trace entries).
AttackEffect apply_attack(const GameAction& a, WorldState& state,
                          const Topology& topo, const ActorId& actor) {
  AttackEffect out;
  switch (a.kind) {
    case GameAction::Kind::NoOp:
      break;
    case GameAction::Kind::EnterRoom:
      out.landed = !enter_room_in_place(state, topo, actor, a.room);
      break;
    case GameAction::Kind::ControlDevice:
      out.landed = !control_device_in_place(state, topo, actor, a.device);
      break;
    case GameAction::Kind::ModifyAcl:
      out.landed = !modify_acl_in_place(state, topo, actor, a.device, a.rule, a.add_rule);
      break;
    case GameAction::Kind::EnablePort:
      out.landed = !enable_port_in_place(state, topo, actor, a.src, a.dst);
      break;
    case GameAction::Kind::AccessService: {
      auto r = access_service_in_place(state, topo, actor, a.src, a.dst,
                                       a.service, a.credential);
      if (r && r.value().granted) {
        out.landed = true;
        out.harvested = !r.value().yields_granted.empty();
      }
      break;
    }
    case GameAction::Kind::UseCredential: {
      // Presents a possessed credential to the service it unlocks, from the
      // first controlled device with a clear path. Failed tries leave no
      // trace, so each one works on a scratch copy.
      if (!precond_holds(a, state, topo, actor)) break;
      auto ctrl = state.controlled.find(actor);
      for (const auto& src : ctrl->second) {
        WorldState trial = state;
        auto r = access_service_in_place(trial, topo, actor, src, a.dst,
                                         a.service, a.credential);
        if (r && r.value().granted) {
          out.landed = true;
          out.harvested = !r.value().yields_granted.empty();
          state = std::move(trial);
          break;
        }
      }
      break;
    }
    default:
      break;
  }
  return out;
}

}  // namespace

WorldState apply_actor_action(const WorldState& state, const Topology& topo,
                              const ActorId& actor, const GameAction& a) {
  WorldState next = state;
  apply_attack(a, next, topo, actor);
  return next;
}

void apply_actor_action_in_place(WorldState& state, const Topology& topo,
                                 const ActorId& actor, const GameAction& a) {
  apply_attack(a, state, topo, actor);
}

double defense_effectiveness(const GameAction& a, const GameAction& d,
                             const WorldState& state, const Topology& topo,
                             const ActorId& attacker) {
  if (a.is_noop()) return 0;
  if (!precond_holds(a, state, topo, attacker)) return 0;
  WorldState after = apply_defense(d, state, topo);
  return precond_holds(a, after, topo, attacker) ? 0.0 : 1.0;
}

bool capture_check(const GameAction& d, const ActorId& attacker,
                   const std::vector<TraceEntry>& trace) {
  if (d.kind != GameAction::Kind::AuditDevice) return false;
  for (const auto& e : trace)
    if (e.actor == attacker && e.device == d.device) return true;
  return false;
}

StepResult step(const WorldState& state, const Topology& topo, int t,
                const GameAction& attack, const GameAction& defense,
                const RewardModel& model, const EpisodeConfig& config,
                const ActorId& attacker_id) {
  StepResult result;
  double alpha = defense_effectiveness(attack, defense, state, topo, attacker_id);

  WorldState after_d = apply_defense(defense, state, topo);
  AttackEffect atk;
  if (alpha < 1.0) atk = apply_attack(attack, after_d, topo, attacker_id);

  // Definition 3: a failed attack means alpha = 1, whatever the cause.
  double alpha_reward = attack.is_noop() ? alpha : (atk.landed ? alpha : 1.0);
  result.alpha = alpha_reward;
  result.attack_landed = atk.landed;
  result.attacker_reward = attack_reward(alpha_reward, attack, defense, model, atk.harvested);
  result.defender_reward = defense_reward(alpha_reward, attack, defense, model, atk.harvested);

  bool captured = capture_check(defense, attacker_id, after_d.trace);
  if (defense.kind == GameAction::Kind::AuditDevice && !captured) {
    for (const auto& e : after_d.trace)
      if (e.actor != attacker_id && e.device == defense.device)
        result.false_capture = true;
  }

  if (after_d.possesses(attacker_id, after_d.target_file)) {
    result.terminal = Outcome::Success;
    result.attacker_reward += model.terminal.success_ar;
    result.defender_reward += model.terminal.success_dr;
  } else if (captured) {
    result.terminal = Outcome::Captured;
    result.attacker_reward += model.terminal.captured_ar;
    result.defender_reward += model.terminal.captured_dr;
  } else if (t + 1 >= config.max_slices) {
    result.terminal = Outcome::Timeout;
    result.attacker_reward += model.terminal.timeout_ar;
    result.defender_reward += model.terminal.timeout_dr;
  }

  after_d.trace.clear();
  after_d.cut_links.clear();
  result.next_state = std::move(after_d);
  return result;
}

EpisodeRecord run_episode(const Topology& topo, const WorldState& initial,
                          const Policy& attacker_policy, const Policy& defender_policy,
                          const EpisodeConfig& config, const RewardModel& model,
                          const ActorId& attacker_id, const EpisodeHooks& hooks) {
  EpisodeRecord record;
  WorldState state = initial;
  for (int t = 0; t < config.max_slices; ++t) {
    if (hooks.pre_slice) state = hooks.pre_slice(state, t);
    if (hooks.record_states) record.states.push_back(state);
    GameAction a = attacker_policy(state, t);
    GameAction d = defender_policy(state, t);
    StepResult r = step(state, topo, t, a, d, model, config, attacker_id);

    SliceRecord slice{t, a, d, r.alpha, r.attacker_reward, r.defender_reward, r.terminal};
    record.slices.push_back(slice);
    record.total_ar += r.attacker_reward;
    record.total_dr += r.defender_reward;
    if (hooks.on_slice) hooks.on_slice(slice, state, r.next_state);
    state = std::move(r.next_state);
    if (r.terminal) {
      record.outcome = *r.terminal;
      break;
    }
  }
  return record;
}

std::string EpisodeRecord::serialize() const {
  std::ostringstream out;
  out << "# slice\tattack\tdefense\talpha\tar\tdr\toutcome\n";
  for (const auto& s : slices) {
    out << s.slice << '\t' << s.attack.to_string() << '\t' << s.defense.to_string()
        << '\t' << s.alpha << '\t' << s.ar << '\t' << s.dr << '\t'
        << (s.outcome ? to_string(*s.outcome) : "-") << '\n';
  }
  return out.str();
}

}  // namespace mdg
