#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mdg/attacker.hpp"
#include "support/fixtures.hpp"

using namespace mdg;
using mdg::test::fig3;

namespace {

// Drive the script against a fixed defender and return the replayed actions.
std::vector<GameAction> drive(const Scenario& scn, const Policy& defender) {
  AttackScript script = AttackScript::paper_script(scn);
  std::vector<GameAction> actions;
  Policy attacker = [&](const WorldState& s, int) {
    GameAction a = script.next_action(s);
    actions.push_back(a);
    return a;
  };
  EpisodeConfig cfg = scn.episode;
  cfg.attack_probability = 1.0;
  run_episode(scn.topo, scn.initial, attacker, defender, cfg, scn.model);
  return actions;
}

}  // namespace

TEST_CASE("the scripted attack takes a fixed number of primitive moves") {
  const Scenario& scn = fig3();
  Policy noop = [](const WorldState&, int) { return GameAction{}; };
  std::vector<GameAction> actions = drive(scn, noop);

  // Regression: acting every slice against a passive defender, the chain is
  //   R2, control D1, access D1_store,                        (3)
  //   back outside, R1, control T1,                           (3)
  //   access FW1_mgmt, add ACL to T2, access T2_manager,      (3)
  //   enable T2-S1 port, access FW2_mgmt, add S1/S2 rules,    (4)
  //   access S1_web, access S2_web                            (2)
  CHECK(actions.size() == 15);
  for (const auto& a : actions) CHECK_FALSE(a.is_noop());

  // Same run, same actions: the script is deterministic.
  std::vector<GameAction> again = drive(scn, noop);
  CHECK(actions == again);
}

TEST_CASE("the script replans around a removed ACL rule") {
  const Scenario& scn = fig3();
  int removals = 0;
  Policy strip_once = [&](const WorldState& s, int t) {
    GameAction d;
    d.role = Role::Defender;
    // Remove whatever rule targets T2 the first time one appears.
    if (removals == 0) {
      auto it = s.acl.find("FW1");
      if (it != s.acl.end())
        for (const auto& r : it->second)
          if (r.dst == "T2") {
            d.kind = GameAction::Kind::ModifyAcl;
            d.rule = r;
            d.add_rule = false;
            ++removals;
            break;
          }
    }
    return d;
  };
  AttackScript script = AttackScript::paper_script(scn);
  Policy attacker = [&](const WorldState& s, int) { return script.next_action(s); };
  EpisodeConfig cfg = scn.episode;
  cfg.attack_probability = 1.0;
  EpisodeRecord rec = run_episode(scn.topo, scn.initial, attacker, strip_once, cfg, scn.model);
  CHECK(removals == 1);
  CHECK(rec.outcome == Outcome::Success);  // the rule is simply re-added
  CHECK_FALSE(script.dead());
}

TEST_CASE("rotating a prerequisite credential kills the script permanently") {
  const Scenario& scn = fig3();
  Policy rotate_t2 = [](const WorldState&, int t) {
    GameAction d;
    d.role = Role::Defender;
    if (t == 2) {
      d.kind = GameAction::Kind::RotateCredential;
      d.credential = "T2_manager";
    }
    return d;
  };
  AttackScript script = AttackScript::paper_script(scn);
  Policy attacker = [&](const WorldState& s, int) { return script.next_action(s); };
  EpisodeConfig cfg = scn.episode;
  cfg.attack_probability = 1.0;
  EpisodeRecord rec = run_episode(scn.topo, scn.initial, attacker, rotate_t2, cfg, scn.model);
  CHECK(rec.outcome == Outcome::Timeout);
  CHECK(script.dead());
  // Once dead the script emits NoOp forever.
  CHECK(script.next_action(scn.initial).is_noop());
}

TEST_CASE("population counts follow the user-population ratio") {
  const Scenario& scn = fig3();
  EpisodeConfig cfg = scn.episode;  // UP = 0.4, 100 attackers

  auto pop = spawn_population(scn, cfg, 1);
  int attackers = 0, benign = 0;
  std::set<std::uint64_t> seeds;
  for (const auto& p : pop) {
    (p.is_attacker ? attackers : benign)++;
    seeds.insert(p.rng_seed);
    if (!p.is_attacker) CHECK_FALSE(p.home.empty());
  }
  CHECK(attackers == 100);
  CHECK(benign == 150);  // round(100 * 0.6 / 0.4)
  CHECK(seeds.size() == pop.size());  // independent streams

  SUBCASE("UP = 1 means attackers only") {
    cfg.user_population_ratio = 1.0;
    auto only = spawn_population(scn, cfg, 1);
    CHECK(only.size() == 100);
    for (const auto& p : only) CHECK(p.is_attacker);
  }
  SUBCASE("spawning is deterministic in the seed") {
    auto again = spawn_population(scn, cfg, 1);
    REQUIRE(again.size() == pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(again[i].id == pop[i].id);
      CHECK(again[i].rng_seed == pop[i].rng_seed);
    }
    auto other = spawn_population(scn, cfg, 2);
    CHECK(other[0].rng_seed != pop[0].rng_seed);
  }
}

TEST_CASE("attackers act with probability AP per slice") {
  const Scenario& scn = fig3();
  UserProfile p;
  p.id = "attacker";
  p.is_attacker = true;
  p.ap = 0.3;
  AttackScript script = AttackScript::paper_script(scn);
  Rng rng(424242);
  int acted = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    // From the initial state the script's next move is always enter R1.
    GameAction a = user_tick(p, scn.initial, scn, script, rng);
    if (!a.is_noop()) ++acted;
  }
  double frac = static_cast<double>(acted) / n;
  CHECK(frac == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("benign users only take legal, harmless actions") {
  const Scenario& scn = fig3();
  EpisodeConfig cfg = scn.episode;
  auto pop = spawn_population(scn, cfg, 3);
  const UserProfile* benign = nullptr;
  for (const auto& p : pop)
    if (!p.is_attacker) {
      benign = &p;
      break;
    }
  REQUIRE(benign != nullptr);

  WorldState s = admit_benign_user(scn.initial, scn, *benign);
  CHECK(s.controls(benign->id, benign->home));
  CHECK(s.actor_location.at(benign->id) == scn.topo.devices.at(benign->home).room);

  Rng rng(benign->rng_seed);
  for (int i = 0; i < 500; ++i) {
    GameAction a = benign_action(*benign, s, scn, rng);
    switch (a.kind) {
      case GameAction::Kind::NoOp:
        break;
      case GameAction::Kind::EnterRoom:
        CHECK(scn.topo.adjacent(s.actor_location.at(benign->id), a.room));
        break;
      case GameAction::Kind::AccessService: {
        CHECK(a.src == benign->home);
        const Service* svc = scn.topo.devices.at(a.dst).find_service(a.service);
        REQUIRE(svc != nullptr);
        CHECK_FALSE(svc->required_credential.has_value());
        break;
      }
      default:
        FAIL("unexpected benign action kind: ", a.to_string());
    }
    s = apply_actor_action(s, scn.topo, benign->id, a);
  }
  // Browsing never grants possessions or harms anything.
  CHECK(s.possessions.count(benign->id) == 0);
}
