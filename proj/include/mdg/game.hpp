#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdg/rng.hpp"
#include "mdg/world.hpp"

namespace mdg {

enum class Role { Attacker, Defender };

// Tagged multi-domain action. One flat struct: the kind selects which
// argument fields are meaningful. NoOp is valid for both roles.
struct GameAction {
  enum class Kind {
    NoOp,
    EnterRoom,       // physical, both roles
    ControlDevice,   // physical, both roles
    ModifyAcl,       // network, both roles (requires a management session)
    EnablePort,      // network, attacker only
    AccessService,   // network, both roles
    CutTraffic,      // network, defender only
    UseCredential,   // digital, attacker only
    RotateCredential,// digital, defender only
    RestartService,  // control, defender only
    AuditDevice,     // control, defender only
  };

  Role role = Role::Attacker;
  Kind kind = Kind::NoOp;

  RoomId room;                           // EnterRoom
  DeviceId device;                       // ControlDevice / AuditDevice / RestartService / ModifyAcl firewall
  DeviceId src, dst;                     // AccessService / EnablePort / CutTraffic
  ServiceName service;                   // AccessService / RestartService
  std::optional<CredentialId> credential;// AccessService / UseCredential / RotateCredential
  AclRule rule;                          // ModifyAcl
  bool add_rule = true;                  // ModifyAcl

  bool is_noop() const { return kind == Kind::NoOp; }
  std::string to_string() const;
  static const char* kind_name(Kind k);
  bool operator==(const GameAction&) const = default;
};

struct TerminalSchedule {
  double success_ar = 10, success_dr = -10;
  double captured_ar = -10, captured_dr = 10;
  double timeout_ar = -5, timeout_dr = 0;
};

// Cost tables keyed by action kind name; AC(a) = attack launch cost,
// DC(a) = damage an attack inflicts, DC(d) = defense operating cost.
struct RewardModel {
  std::map<std::string, double> attack_cost;
  std::map<std::string, double> damage_cost;
  double harvest_damage = 2.0;  // DC(a) when an access grants payloads
  std::map<std::string, double> defense_cost;
  TerminalSchedule terminal;

  double ac(const GameAction& a) const;
  double dc_attack(const GameAction& a, bool harvested) const;
  double dc_defense(const GameAction& d) const;
};

enum class Outcome { Success, Captured, Timeout };
const char* to_string(Outcome o);

struct StepResult {
  WorldState next_state;
  double attacker_reward = 0;
  double defender_reward = 0;
  std::optional<Outcome> terminal;
  bool attack_landed = false;
  bool false_capture = false;  // audit hit a device only benign users touched
  double alpha = 0;
};

struct EpisodeConfig {
  int max_slices = 60;
  int n_attackers = 100;
  double user_population_ratio = 0.4;  // UP
  double attack_probability = 0.3;     // AP
  std::uint64_t seed = 0;
};

// Defense effectiveness per Definition 3 semantics: 1 when d destroys a
// precondition of a within this slice, else 0. Computed structurally by
// applying d to a copy of the state and re-checking a's preconditions.
double defense_effectiveness(const GameAction& a, const GameAction& d,
                             const WorldState& state, const Topology& topo,
                             const ActorId& attacker_id = "attacker");

// AR = (1 - alpha) * DC(a) + DC(d) - AC(a)
double attack_reward(double alpha, const GameAction& a, const GameAction& d,
                     const RewardModel& model, bool harvested = true);
// DR = AC(a) - (1 - alpha) * DC(a) - DC(d)
double defense_reward(double alpha, const GameAction& a, const GameAction& d,
                      const RewardModel& model, bool harvested = true);

// World effect of one actor-side action (used for benign traffic as well as
// attacks). Illegal actions leave the state unchanged.
WorldState apply_actor_action(const WorldState& state, const Topology& topo,
                              const ActorId& actor, const GameAction& a);
void apply_actor_action_in_place(WorldState& state, const Topology& topo,
                                 const ActorId& actor, const GameAction& a);

// True iff d audits a device the attacker touched this slice.
bool capture_check(const GameAction& d, const ActorId& attacker,
                   const std::vector<TraceEntry>& trace);

// One simultaneous-move slice. Defender effect resolves first; the attack
// lands only if alpha < 1 and its preconditions still hold. Illegal actions
// waste the slice (Denied, zero world effect).
StepResult step(const WorldState& state, const Topology& topo, int t,
                const GameAction& attack, const GameAction& defense,
                const RewardModel& model, const EpisodeConfig& config,
                const ActorId& attacker_id = "attacker");

using Policy = std::function<GameAction(const WorldState&, int slice)>;

struct SliceRecord {
  int slice = 0;
  GameAction attack;
  GameAction defense;
  double alpha = 0;
  double ar = 0;
  double dr = 0;
  std::optional<Outcome> outcome;
};

struct EpisodeRecord {
  std::vector<SliceRecord> slices;
  std::vector<WorldState> states;  // state before each slice
  Outcome outcome = Outcome::Timeout;
  double total_ar = 0;
  double total_dr = 0;

  std::string serialize() const;  // line-delimited trace
};

// Per-slice hook: (slice record, state before, state after). Benign actors,
// when supplied, take one legal action each per slice before resolution.
struct EpisodeHooks {
  std::function<void(const SliceRecord&, const WorldState&, const WorldState&)> on_slice;
  std::function<WorldState(const WorldState&, int)> pre_slice;  // e.g. benign traffic
  bool record_states = true;  // fill EpisodeRecord.states (copies the state per slice)
};

EpisodeRecord run_episode(const Topology& topo, const WorldState& initial,
                          const Policy& attacker_policy, const Policy& defender_policy,
                          const EpisodeConfig& config, const RewardModel& model,
                          const ActorId& attacker_id = "attacker",
                          const EpisodeHooks& hooks = {});

}  // namespace mdg
