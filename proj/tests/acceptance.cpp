// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any hard criterion fails. Criterion 10 is
// reported but never fails the run (method ordering is configuration-
// sensitive). argv[1] must point at the CLI binary (used by criterion 11).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "mdg/agents/train.hpp"
#include "mdg/attacker.hpp"
#include "mdg/metrics.hpp"
#include "mdg/scenario.hpp"
#include "support/chain_mdp.hpp"

using namespace mdg;
using mdg::test::ChainMdp;
namespace fs = std::filesystem;

namespace {

Scenario g_scn = [] {
  return load_scenario_file(std::string(MDG_SCENARIO_DIR) + "/paper_fig3.scn");
}();
std::string g_cli;

// --- 1. attack_reward + defense_reward == 0, exactly -------------------------
bool zero_sum(std::string& detail) {
  Rng rng(161803);
  const GameAction::Kind attacks[] = {
      GameAction::Kind::NoOp,          GameAction::Kind::EnterRoom,
      GameAction::Kind::ControlDevice, GameAction::Kind::ModifyAcl,
      GameAction::Kind::EnablePort,    GameAction::Kind::AccessService,
      GameAction::Kind::UseCredential};
  const GameAction::Kind defenses[] = {
      GameAction::Kind::NoOp,           GameAction::Kind::ModifyAcl,
      GameAction::Kind::CutTraffic,     GameAction::Kind::RotateCredential,
      GameAction::Kind::RestartService, GameAction::Kind::AuditDevice};
  for (int i = 0; i < 10000; ++i) {
    RewardModel m = g_scn.model;
    for (auto& [k, v] : m.attack_cost) v = rng.uniform(0, 100);
    for (auto& [k, v] : m.damage_cost) v = rng.uniform(0, 100);
    for (auto& [k, v] : m.defense_cost) v = rng.uniform(0, 100);
    m.harvest_damage = rng.uniform(0, 100);
    GameAction a, d;
    a.kind = attacks[rng.index(7)];
    d.role = Role::Defender;
    d.kind = defenses[rng.index(6)];
    double alpha = rng.uniform() < 0.5 ? 0.0 : 1.0;
    bool harvested = rng.uniform() < 0.5;
    double sum = attack_reward(alpha, a, d, m, harvested) +
                 defense_reward(alpha, a, d, m, harvested);
    if (sum != 0.0) {
      detail = "nonzero sum " + std::to_string(sum) + " at case " + std::to_string(i);
      return false;
    }
  }
  detail = "10000 randomized cost tables, AR + DR == 0 bitwise";
  return true;
}

// --- 2. scripted attack vs passive defender ---------------------------------
std::vector<EpisodeRecord> run_attackers(const Scenario& scn, const Policy& defender,
                                         int n, std::uint64_t seed) {
  EpisodeConfig cfg = scn.episode;
  cfg.n_attackers = n;
  auto pop = spawn_population(scn, cfg, seed);
  // ASR is measured over attackers only; benign browsing cannot touch the
  // attack chain's preconditions, so these runs skip it.
  EpisodeHooks hooks;
  hooks.record_states = false;
  std::vector<EpisodeRecord> out;
  for (const auto& p : pop)
    if (p.is_attacker) out.push_back(rollout(scn, defender, p, {}, hooks));
  return out;
}

bool scripted_success(std::string& detail) {
  Scenario scn = g_scn;
  scn.episode.attack_probability = 1.0;
  Policy noop = [](const WorldState&, int) { return GameAction{}; };
  auto recs = run_attackers(scn, noop, 100, 21);
  std::size_t worst = 0;
  int wins = 0;
  for (const auto& r : recs) {
    if (r.outcome == Outcome::Success) ++wins;
    worst = std::max(worst, r.slices.size());
  }
  double rate = asr(wins, 100);
  detail = "ASR " + std::to_string(rate) + ", longest run " + std::to_string(worst) +
           " slices";
  return rate == 1.0 && worst <= 20;
}

// --- 3. rotation at slice 0 blocks everything -------------------------------
bool rotation_blocks(std::string& detail) {
  Scenario scn = g_scn;
  scn.episode.attack_probability = 1.0;
  Policy rotator = [](const WorldState&, int t) {
    GameAction d;
    d.role = Role::Defender;
    if (t == 0) {
      d.kind = GameAction::Kind::RotateCredential;
      d.credential = "FW1_password";
    }
    return d;
  };
  auto recs = run_attackers(scn, rotator, 100, 22);
  int wins = 0;
  for (const auto& r : recs)
    if (r.outcome == Outcome::Success) ++wins;
  detail = "ASR " + std::to_string(asr(wins, 100)) + " with FW1_password rotated at t=0";
  return wins == 0;
}

// --- 4. finite-difference gradient check ------------------------------------
bool gradient_check(std::string& detail) {
  Rng rng(314159);
  const double h = 1e-4;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> sizes{2 + (int)rng.index(4), 3 + (int)rng.index(4),
                           1 + (int)rng.index(3)};
    PolicyNetwork net = PolicyNetwork::random_init(sizes, rng, 0.8);
    const int m = 2;
    Eigen::MatrixXd x(sizes.front(), m), up(sizes.back(), m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < sizes.front(); ++i) x(i, j) = rng.uniform(-1, 1);
      for (int i = 0; i < sizes.back(); ++i) up(i, j) = rng.uniform(-1, 1);
    }
    auto loss = [&](const PolicyNetwork& n) {
      return (up.array() * n.forward_batch(x).array()).sum();
    };
    PolicyNetwork::Gradients g = net.backward_batch(x, up);
    for (std::size_t l = 0; l < net.weights.size(); ++l)
      for (int r = 0; r < net.weights[l].rows(); ++r)
        for (int c = 0; c < net.weights[l].cols(); ++c) {
          PolicyNetwork a = net, b = net;
          a.weights[l](r, c) += h;
          b.weights[l](r, c) -= h;
          double numeric = (loss(a) - loss(b)) / (2 * h);
          double denom = std::max({std::abs(numeric), std::abs(g.weights[l](r, c)), 1e-8});
          worst = std::max(worst, std::abs(numeric - g.weights[l](r, c)) / denom);
        }
  }
  std::ostringstream os;
  os << "max relative error " << worst << " over 20 networks";
  detail = os.str();
  return worst < 1e-5;
}

// --- 5. soft-update law ------------------------------------------------------
bool soft_update_law(std::string& detail) {
  PolicyNetwork target = PolicyNetwork::zeros({2, 3, 1});
  PolicyNetwork source = target;
  for (auto& w : source.weights) w.setOnes();
  for (auto& b : source.biases) b.setOnes();
  const double tau = 0.01;
  double worst = 0;
  for (int k = 1; k <= 100; ++k) {
    soft_update(target, source, tau);
    if (k == 1 || k == 10 || k == 100) {
      double expect = 1.0 - std::pow(0.99, k);
      worst = std::max(worst, std::abs(target.weights[0](0, 0) - expect));
    }
  }
  std::ostringstream os;
  os << "max deviation " << worst << " at k in {1,10,100}";
  detail = os.str();
  return worst < 1e-12;
}

// --- 6. DQN vs value iteration on the bundled chain MDP ---------------------
bool dqn_oracle(std::string& detail) {
  ChainMdp mdp;
  const double gamma = 0.5;
  auto q_star = mdp.value_iteration(gamma);
  auto pi_star = ChainMdp::greedy(q_star);

  Hyperparams hp;
  hp.gamma = gamma;
  hp.hidden = 32;
  hp.batch = 16;
  hp.lr_critic = 0.01;
  hp.target_sync = 50;
  hp.replay_capacity = 1000;
  DefenderAgent agent(Algo::Dqn, 5, 2, hp, 7);
  Rng rng(123);
  for (int round = 0; round < 40; ++round)
    for (int s = 0; s < 5; ++s)
      for (int a = 0; a < 2; ++a)
        agent.observe({mdp.encode(s), a, mdp.reward(s, a),
                       mdp.encode(mdp.next(s, a)), false});
  for (int i = 0; i < 2000; ++i) agent.update(rng);

  double worst = 0;
  for (int s = 0; s < 5; ++s) {
    Eigen::VectorXd q = agent.q_net().forward(mdp.encode(s));
    if ((q[1] >= q[0] ? 1 : 0) != pi_star[s]) {
      detail = "greedy policy disagrees with value iteration at state " +
               std::to_string(s);
      return false;
    }
    worst = std::max({worst, std::abs(q[0] - q_star[s][0]), std::abs(q[1] - q_star[s][1])});
  }
  std::ostringstream os;
  os << "policy exact on 5 states, max |Q - Q*| = " << worst << " after 2000 updates";
  detail = os.str();
  return worst < 0.05;
}

// --- 7. reward randomization statistics --------------------------------------
bool randomization_stats(std::string& detail) {
  RewardFamily family;
  AffineMap map{1.25, 0.5};
  int perturbed = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    std::uint64_t seed = Rng::derive(271828, static_cast<std::uint64_t>(i));
    Rng probe(seed);
    double u = probe.uniform();
    Rng rng(seed);
    double r = -7.25;
    double out = randomize_reward(r, family, map, rng);
    if (u >= 0.5) {
      if (out != r) {
        detail = "pass-through branch altered the reward";
        return false;
      }
    } else {
      ++perturbed;
    }
  }
  double frac = perturbed / double(draws);
  std::ostringstream os;
  os << "perturbed fraction " << frac << " over " << draws << " draws";
  detail = os.str();
  return std::abs(frac - 0.5) < 0.01;
}

// --- 8. ASR formula -----------------------------------------------------------
bool asr_formula(std::string& detail) {
  bool ok = asr(30, 100) == 0.30;
  for (int n = 1; n <= 25; ++n) ok = ok && asr(0, n) == 0.0 && asr(n, n) == 1.0;
  detail = "asr(30,100) = 0.30, asr(0,n) = 0, asr(n,n) = 1 for n in 1..25";
  return ok;
}

// --- 9 & 10. desk-scale training trends --------------------------------------
// Protocol: ap = 1 so the scripted chain completes in ~14 acting slices,
// 30-slice cap, 20 episodes x 20 attackers, lightweight networks, 5 seeds.
struct DeskRun {
  std::vector<double> asr_by_ep, dr_by_ep;
};
std::map<std::string, std::vector<DeskRun>> g_desk;

DeskRun desk_train(Algo algo, std::uint64_t seed) {
  Scenario scn = g_scn;
  scn.episode.attack_probability = 1.0;
  scn.episode.max_slices = 30;

  StateEncoder enc(scn);
  DefenderActionSpace acts = build_defender_actions(scn);
  Hyperparams hp;
  hp.hidden = 32;
  hp.batch = 32;
  hp.lr_critic = 3e-3;
  hp.lr_actor = 3e-4;
  hp.eps_anneal_episodes = 10;
  hp.target_sync = 100;
  DefenderAgent agent(algo, enc.size(), (int)acts.size(), hp, seed);

  TrainConfig cfg;
  cfg.episodes = 20;
  cfg.seed = seed;
  cfg.n_attackers = 20;
  TrainingLog log = train(scn, agent, cfg);
  DeskRun run;
  for (const auto& ep : log.episodes) {
    run.asr_by_ep.push_back(ep.asr);
    run.dr_by_ep.push_back(ep.mean_dr);
  }
  return run;
}

double head3(const std::vector<double>& v) { return (v[0] + v[1] + v[2]) / 3; }
double tail3(const std::vector<double>& v) {
  std::size_t n = v.size();
  return (v[n - 1] + v[n - 2] + v[n - 3]) / 3;
}

bool training_trend(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  for (Algo algo : {Algo::Dqn, Algo::Ddpg, Algo::RrDdpg}) {
    double first_asr = 0, last_asr = 0, first_dr = 0, last_dr = 0;
    auto& runs = g_desk[to_string(algo)];
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      DeskRun run = desk_train(algo, seed);
      first_asr += head3(run.asr_by_ep);
      last_asr += tail3(run.asr_by_ep);
      first_dr += head3(run.dr_by_ep);
      last_dr += tail3(run.dr_by_ep);
      runs.push_back(std::move(run));
    }
    first_asr /= 5;
    last_asr /= 5;
    first_dr /= 5;
    last_dr /= 5;
    os << to_string(algo) << ": ASR " << first_asr << " -> " << last_asr << ", DR "
       << first_dr << " -> " << last_dr << "; ";
    if (!(last_asr < first_asr && last_dr > first_dr)) ok = false;
  }
  detail = os.str();
  return ok;
}

bool method_ordering(std::string& detail) {
  if (g_desk["rrddpg"].size() != 5) {
    detail = "desk-scale runs unavailable";
    return false;
  }
  int wins = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    double rr = tail3(g_desk["rrddpg"][i].asr_by_ep);
    if (rr <= tail3(g_desk["ddpg"][i].asr_by_ep) &&
        rr <= tail3(g_desk["dqn"][i].asr_by_ep))
      ++wins;
  }
  detail = "rr-ddpg final ASR <= both baselines in " + std::to_string(wins) +
           "/5 seeds";
  return wins >= 4;
}

// --- 11. CLI determinism -------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool cli_determinism(std::string& detail) {
  if (g_cli.empty() || !fs::exists(g_cli)) {
    detail = "CLI binary not supplied as argv[1]";
    return false;
  }
  fs::path dir1 = fs::temp_directory_path() / "mdg_acc_run1";
  fs::path dir2 = fs::temp_directory_path() / "mdg_acc_run2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  std::string base = "\"" + g_cli + "\" train --scenario \"" +
                     std::string(MDG_SCENARIO_DIR) + "/paper_fig3.scn\"" +
                     " --algo rrddpg --seed 7 --episodes 10 --attackers 10" +
                     " --max-slices 30 --hidden 32 --batch 32 --eps-anneal 5";
  for (const fs::path& dir : {dir1, dir2}) {
    std::string cmd = base + " --out \"" + dir.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      detail = "training invocation failed";
      return false;
    }
  }
  std::string csv1 = slurp(dir1 / "rrddpg_7.csv");
  std::string csv2 = slurp(dir2 / "rrddpg_7.csv");
  std::ostringstream os;
  os << "two runs, " << std::count(csv1.begin(), csv1.end(), '\n') - 1
     << " episode rows each, byte-identical: " << (csv1 == csv2 ? "yes" : "no");
  detail = os.str();
  return !csv1.empty() && csv1 == csv2;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];

  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
    bool soft;
  };
  const std::vector<Criterion> criteria{
      {1, "zero-sum reward identity", zero_sum, false},
      {2, "scripted attack beats a passive defender", scripted_success, false},
      {3, "credential rotation blocks the attack chain", rotation_blocks, false},
      {4, "analytic gradients vs finite differences", gradient_check, false},
      {5, "soft-update contraction law", soft_update_law, false},
      {6, "DQN matches value iteration on the chain MDP", dqn_oracle, false},
      {7, "reward randomization statistics", randomization_stats, false},
      {8, "ASR formula", asr_formula, false},
      {9, "training trend: ASR falls, defender reward rises", training_trend, false},
      {10, "method ordering (soft): rr-ddpg best", method_ordering, true},
      {11, "CLI training determinism", cli_determinism, false},
  };

  bool all_ok = true;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("[%s] %2d. %s (%.1fs) — %s\n",
                ok ? "PASS" : (c.soft ? "SOFT-FAIL" : "FAIL"), c.id, c.name, secs,
                detail.c_str());
    if (!ok && !c.soft) all_ok = false;
  }
  std::printf("%s\n", all_ok ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL");
  return all_ok ? 0 : 1;
}
