#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "mdg/agents/train.hpp"
#include "mdg/attacker.hpp"
#include "mdg/metrics.hpp"
#include "mdg/scenario.hpp"

namespace fs = std::filesystem;
using namespace mdg;

namespace {

constexpr int kExitOk = 0, kExitInput = 1, kExitInternal = 2;

Scenario load_checked(const std::string& path) {
  if (!fs::exists(path)) throw ScenarioValidationError("no such scenario file: " + path);
  return load_scenario_file(path);
}

int cmd_validate(const std::string& path) {
  Scenario scn = load_checked(path);
  StateEncoder enc(scn);
  DefenderActionSpace acts = build_defender_actions(scn);
  std::cout << "scenario: " << scn.name << "\n"
            << "rooms: " << scn.topo.rooms.size() << "\n"
            << "devices: " << scn.topo.devices.size() << "\n";
  for (const auto& [id, dev] : scn.topo.devices)
    std::cout << "  " << id << " (" << to_string(dev.kind) << ", " << dev.room << ")\n";
  std::cout << "links: " << scn.topo.links.size() << "\n"
            << "services: " << scn.service_pairs().size() << "\n"
            << "credentials: " << scn.credentials.size() << "\n"
            << "target file: " << scn.initial.target_file << "\n"
            << "defender actions: " << acts.size() << "\n"
            << "state encoding length: " << enc.size() << "\n"
            << "max slices: " << scn.episode.max_slices
            << ", attackers per episode: " << scn.episode.n_attackers << "\n";
  return kExitOk;
}

// Rotates every credential, one per slice, in sorted order.
Policy rotate_defender(const Scenario& scn) {
  auto creds = scn.credentials;
  return [creds](const WorldState&, int t) {
    GameAction d;
    d.role = Role::Defender;
    if (t < static_cast<int>(creds.size())) {
      d.kind = GameAction::Kind::RotateCredential;
      d.credential = creds[static_cast<std::size_t>(t)].id;
    }
    return d;
  };
}

int cmd_simulate(const std::string& path, const std::string& defender, double ap,
                 std::uint64_t seed, const std::string& trace_path) {
  Scenario scn = load_checked(path);
  if (ap >= 0) scn.episode.attack_probability = ap;
  if (defender != "noop" && defender != "scripted-rotate")
    throw ScenarioValidationError("unknown defender: " + defender);

  Policy def = defender == "noop"
                   ? Policy([](const WorldState&, int) { return GameAction{}; })
                   : rotate_defender(scn);
  UserProfile attacker;
  attacker.id = "attacker";
  attacker.is_attacker = true;
  attacker.ap = scn.episode.attack_probability;
  attacker.rng_seed = Rng::derive(seed, 0);

  EpisodeRecord rec = rollout(scn, def, attacker, {});
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + trace_path);
    out << rec.serialize();
  }
  std::cout << "outcome: " << to_string(rec.outcome) << " after " << rec.slices.size()
            << " slices (attacker reward " << rec.total_ar << ", defender reward "
            << rec.total_dr << ")\n";
  return kExitOk;
}

struct TrainArgs {
  std::string scenario, algo = "rrddpg", out_dir = ".";
  int episodes = 100;
  std::uint64_t seed = 0;
  int attackers = -1;
  int max_slices = -1;
  int parallel = 1;
  Hyperparams hp;
  RewardFamily family;
};

void train_one(const TrainArgs& args, std::uint64_t seed) {
  Scenario scn = load_checked(args.scenario);
  if (args.max_slices > 0) scn.episode.max_slices = args.max_slices;
  auto algo = algo_from_string(args.algo);
  if (!algo) throw ConfigError("unknown algo: " + args.algo);

  StateEncoder enc(scn);
  DefenderActionSpace acts = build_defender_actions(scn);
  DefenderAgent agent(*algo, enc.size(), static_cast<int>(acts.size()), args.hp, seed);

  TrainConfig cfg;
  cfg.episodes = args.episodes;
  cfg.seed = seed;
  cfg.family = args.family;
  cfg.n_attackers = args.attackers;
  TrainingLog log = train(scn, agent, cfg);

  fs::create_directories(args.out_dir);
  std::string stem = args.algo + "_" + std::to_string(seed);
  export_csv(log.episodes, (fs::path(args.out_dir) / (stem + ".csv")).string());
  if (args.episodes > 0)
    agent.save((fs::path(args.out_dir) / (stem + ".agent")).string());

  double tail_asr = 0;
  int tail = std::min<int>(10, static_cast<int>(log.episodes.size()));
  for (int i = 0; i < tail; ++i)
    tail_asr += log.episodes[log.episodes.size() - 1 - i].asr;
  if (tail > 0) tail_asr /= tail;
  std::cout << "seed " << seed << ": " << log.episodes.size()
            << " episodes trained; mean ASR over final " << tail << ": " << tail_asr
            << "\n";
}

int cmd_train(const TrainArgs& args) {
  if (args.parallel <= 1) {
    train_one(args, args.seed);
    return kExitOk;
  }
  // Independent seeds, fully isolated runs.
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(args.parallel));
  for (int i = 0; i < args.parallel; ++i)
    workers.emplace_back([&, i] {
      try {
        train_one(args, args.seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return kExitOk;
}

int cmd_eval(const std::string& scenario, const std::string& agent_path,
             int attackers, std::uint64_t seed) {
  Scenario scn = load_checked(scenario);
  if (!fs::exists(agent_path))
    throw ScenarioValidationError("no such agent file: " + agent_path);
  DefenderAgent agent = DefenderAgent::load(agent_path);
  EpisodeStats stats = evaluate(scn, agent, seed, attackers);
  std::cout << "algo: " << stats.algo << "\nASR: " << stats.asr
            << "\nmean defender reward: " << stats.mean_dr
            << "\nmean attacker reward: " << stats.mean_ar << "\n";
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out) {
  std::vector<EpisodeStats> rows;
  for (const auto& path : csvs) {
    if (!fs::exists(path)) throw std::invalid_argument("no such CSV: " + path);
    auto part = read_csv(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_curves(rows, out);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-domain attack/defense game simulator and trainer"};
  app.require_subcommand(1);

  std::string scenario, trace_path, defender = "noop", agent_path, plot_out = "curves.svg";
  std::vector<std::string> csvs;
  double ap = -1;
  std::uint64_t seed = 0;
  int attackers = -1;
  TrainArgs targs;

  auto* validate = app.add_subcommand("validate", "Load and check a scenario file");
  validate->add_option("scenario", scenario)->required();

  auto* simulate = app.add_subcommand("simulate", "One scripted-attacker rollout");
  simulate->add_option("scenario", scenario)->required();
  simulate->add_option("--defender", defender, "noop or scripted-rotate");
  simulate->add_option("--ap", ap, "attack probability per slice");
  simulate->add_option("--seed", seed);
  simulate->add_option("--trace", trace_path, "write the slice trace here");

  auto* train = app.add_subcommand("train", "Train a defender agent");
  train->add_option("--scenario", targs.scenario)->required();
  train->add_option("--algo", targs.algo, "dqn, ddpg or rrddpg");
  train->add_option("--episodes", targs.episodes)->check(CLI::NonNegativeNumber);
  train->add_option("--seed", targs.seed)->required();
  train->add_option("--out", targs.out_dir, "output directory");
  train->add_option("--attackers", targs.attackers, "attackers per episode");
  train->add_option("--max-slices", targs.max_slices);
  train->add_option("--parallel", targs.parallel, "independent seeds run concurrently");
  train->add_option("--gamma", targs.hp.gamma);
  train->add_option("--tau", targs.hp.tau);
  train->add_option("--lr-critic", targs.hp.lr_critic);
  train->add_option("--lr-actor", targs.hp.lr_actor);
  train->add_option("--hidden", targs.hp.hidden);
  train->add_option("--batch", targs.hp.batch);
  train->add_option("--capacity", targs.hp.replay_capacity);
  train->add_option("--eps-anneal", targs.hp.eps_anneal_episodes);
  train->add_option("--noise-sigma", targs.hp.noise_sigma);
  train->add_option("--a-lo", targs.family.a_lo);
  train->add_option("--a-hi", targs.family.a_hi);
  train->add_option("--b-lo", targs.family.b_lo);
  train->add_option("--b-hi", targs.family.b_hi);
  train->add_option("--fine-tune-fraction", targs.family.f);

  auto* eval = app.add_subcommand("eval", "Evaluate a saved agent, frozen policy");
  eval->add_option("--scenario", scenario)->required();
  eval->add_option("--agent", agent_path)->required();
  eval->add_option("--attackers", attackers);
  eval->add_option("--seed", seed)->required();

  auto* plot = app.add_subcommand("plot", "Render ASR / reward curves to SVG");
  plot->add_option("csv", csvs)->required();
  plot->add_option("--out", plot_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(scenario);
    if (simulate->parsed()) return cmd_simulate(scenario, defender, ap, seed, trace_path);
    if (train->parsed()) return cmd_train(targs);
    if (eval->parsed()) return cmd_eval(scenario, agent_path, attackers, seed);
    if (plot->parsed()) return cmd_plot(csvs, plot_out);
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ScenarioValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
