#include "mdg/agents/train.hpp"

#include <algorithm>
#include <cmath>

namespace mdg {

namespace {

double epsilon_for(const Hyperparams& hp, int episode) {
  if (hp.eps_anneal_episodes <= 0) return hp.eps_end;
  double frac = std::min(1.0, static_cast<double>(episode) / hp.eps_anneal_episodes);
  return hp.eps_start + frac * (hp.eps_end - hp.eps_start);
}

void check_dimensions(const Scenario& scn, const DefenderAgent& agent,
                      const StateEncoder& enc, const DefenderActionSpace& acts) {
  if (enc.size() != agent.state_dim())
    throw ConfigError("agent state dimension " + std::to_string(agent.state_dim()) +
                      " does not match scenario encoding " + std::to_string(enc.size()));
  if (static_cast<int>(acts.size()) != agent.n_actions())
    throw ConfigError("agent action count " + std::to_string(agent.n_actions()) +
                      " does not match scenario action space " +
                      std::to_string(acts.size()));
  (void)scn;
}

}  // namespace

EpisodeRecord rollout(const Scenario& scn, const Policy& defender_policy,
                      const UserProfile& attacker,
                      const std::vector<UserProfile>& benign,
                      const EpisodeHooks& extra) {
  WorldState init = scn.initial;
  for (const auto& b : benign) init = admit_benign_user(init, scn, b);

  AttackScript script = AttackScript::paper_script(scn);
  Rng attacker_rng(attacker.rng_seed);
  std::vector<Rng> benign_rngs;
  benign_rngs.reserve(benign.size());
  for (const auto& b : benign)
    benign_rngs.emplace_back(Rng::derive(b.rng_seed, attacker.rng_seed));

  Policy attacker_policy = [&](const WorldState& s, int) {
    return user_tick(attacker, s, scn, script, attacker_rng);
  };

  EpisodeHooks hooks;
  hooks.on_slice = extra.on_slice;
  hooks.record_states = extra.record_states;
  hooks.pre_slice = [&](const WorldState& s, int t) {
    WorldState cur = extra.pre_slice ? extra.pre_slice(s, t) : s;
    for (std::size_t i = 0; i < benign.size(); ++i) {
      GameAction a = benign_action(benign[i], cur, scn, benign_rngs[i]);
      apply_actor_action_in_place(cur, scn.topo, benign[i].id, a);
    }
    return cur;
  };

  return run_episode(scn.topo, init, attacker_policy, defender_policy, scn.episode,
                     scn.model, "attacker", hooks);
}

TrainingLog train(const Scenario& scn, DefenderAgent& agent, const TrainConfig& cfg) {
  StateEncoder enc(scn);
  DefenderActionSpace acts = build_defender_actions(scn);
  check_dimensions(scn, agent, enc, acts);

  EpisodeConfig ecfg = scn.episode;
  if (cfg.n_attackers > 0) ecfg.n_attackers = cfg.n_attackers;
  const int total =
      cfg.total_episodes > 0 ? cfg.total_episodes : cfg.start_episode + cfg.episodes;

  TrainingLog log;
  for (int e = 0; e < cfg.episodes; ++e) {
    const int ep = cfg.start_episode + e;
    const bool randomized = cfg.randomize && agent.algo() == Algo::RrDdpg &&
                            ep < (1.0 - cfg.family.f) * total;
    Rng map_rng(Rng::derive(cfg.seed, 0xA0000000ULL + ep));
    Rng perturb_rng(Rng::derive(cfg.seed, 0xB0000000ULL + ep));
    Rng act_rng(Rng::derive(cfg.seed, 0xC0000000ULL + ep));
    std::uint64_t pop_seed = Rng::derive(cfg.seed, 0xD0000000ULL + ep);
    const AffineMap map = sample_map(cfg.family, map_rng);
    const double epsilon = epsilon_for(agent.hyperparams(), ep);

    auto population = spawn_population(scn, ecfg, pop_seed);
    std::vector<UserProfile> benign;
    for (const auto& p : population)
      if (!p.is_attacker) benign.push_back(p);

    std::vector<EpisodeRecord> records;
    for (const auto& p : population) {
      if (!p.is_attacker) continue;
      int last_action = 0;
      Policy defender = [&](const WorldState& s, int t) {
        last_action = agent.select_action(enc.encode(s, t), true, epsilon, act_rng);
        return acts[static_cast<std::size_t>(last_action)];
      };
      EpisodeHooks hooks;
      hooks.record_states = false;
      hooks.on_slice = [&](const SliceRecord& sl, const WorldState& before,
                           const WorldState& after) {
        double r = sl.dr;
        if (randomized) r = randomize_reward(r, cfg.family, map, perturb_rng);
        agent.observe({enc.encode(before, sl.slice), last_action, r,
                       enc.encode(after, sl.slice + 1), sl.outcome.has_value()});
        agent.update(act_rng);
      };
      records.push_back(rollout(scn, defender, p, benign, hooks));
    }

    EpisodeStats stats = aggregate(records);
    stats.episode = ep;
    stats.algo = to_string(agent.algo());
    stats.seed = cfg.seed;
    log.episodes.push_back(std::move(stats));
  }
  return log;
}

TrainingLog fine_tune(DefenderAgent& agent, const Scenario& scn, TrainConfig cfg) {
  const int total = cfg.total_episodes > 0 ? cfg.total_episodes : cfg.episodes;
  const int n_ft = static_cast<int>(std::llround(cfg.family.f * total));
  if (n_ft <= 0) return {};
  cfg.randomize = false;
  cfg.start_episode = total - n_ft;
  cfg.episodes = n_ft;
  cfg.total_episodes = total;
  return train(scn, agent, cfg);
}

EpisodeStats evaluate(const Scenario& scn, DefenderAgent& agent, std::uint64_t seed,
                      int n_attackers) {
  StateEncoder enc(scn);
  DefenderActionSpace acts = build_defender_actions(scn);
  check_dimensions(scn, agent, enc, acts);

  EpisodeConfig ecfg = scn.episode;
  if (n_attackers > 0) ecfg.n_attackers = n_attackers;
  Rng rng(Rng::derive(seed, 0x5EEDULL));

  auto population = spawn_population(scn, ecfg, seed);
  std::vector<UserProfile> benign;
  for (const auto& p : population)
    if (!p.is_attacker) benign.push_back(p);

  Policy defender = [&](const WorldState& s, int t) {
    int i = agent.select_action(enc.encode(s, t), false, 0.0, rng);
    return acts[static_cast<std::size_t>(i)];
  };

  EpisodeHooks hooks;
  hooks.record_states = false;
  std::vector<EpisodeRecord> records;
  for (const auto& p : population)
    if (p.is_attacker) records.push_back(rollout(scn, defender, p, benign, hooks));

  EpisodeStats stats = aggregate(records);
  stats.algo = to_string(agent.algo());
  stats.seed = seed;
  return stats;
}

}  // namespace mdg
