#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdg/agents/agent.hpp"
#include "mdg/agents/encoding.hpp"
#include "mdg/agents/reward_random.hpp"
#include "mdg/attacker.hpp"
#include "mdg/metrics.hpp"
#include "mdg/scenario.hpp"

namespace mdg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int episodes = 100;
  std::uint64_t seed = 0;
  RewardFamily family;
  int n_attackers = -1;      // -1: scenario default
  // Episode numbering offset: keeps epsilon annealing and log rows continuous
  // when fine-tuning resumes after a randomized phase.
  int start_episode = 0;
  int total_episodes = -1;   // -1: start_episode + episodes
  bool randomize = true;     // master switch for the rr-ddpg perturbation
};

struct TrainingLog {
  std::vector<EpisodeStats> episodes;
};

// One full training run: per episode, spawn the attacker population, roll
// each attacker against the learning defender (benign users generate traffic
// inside every rollout), store transitions and update after every slice.
// rr-ddpg perturbs stored rewards while the episode index is below
// (1 - f) * total episodes; logged stats always use the raw rewards.
TrainingLog train(const Scenario& scn, DefenderAgent& agent, const TrainConfig& cfg);

// The trailing fine-tune phase: the last f fraction of cfg.episodes, trained
// on the true reward. No-op when f = 0.
TrainingLog fine_tune(DefenderAgent& agent, const Scenario& scn, TrainConfig cfg);

// Frozen-policy evaluation (no exploration, no updates, no perturbation)
// against a fresh population.
EpisodeStats evaluate(const Scenario& scn, DefenderAgent& agent, std::uint64_t seed,
                      int n_attackers = -1);

// One scripted-attacker rollout against a fixed defender policy, with benign
// traffic; shared by training, evaluation and the simulate command.
EpisodeRecord rollout(const Scenario& scn, const Policy& defender_policy,
                      const UserProfile& attacker,
                      const std::vector<UserProfile>& benign,
                      const EpisodeHooks& extra = {});

}  // namespace mdg
