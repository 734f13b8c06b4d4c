#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mdg/agents/net.hpp"
#include "mdg/agents/replay.hpp"
#include "mdg/rng.hpp"

namespace mdg {

enum class Algo { Dqn, Ddpg, RrDdpg };

const char* to_string(Algo a);
std::optional<Algo> algo_from_string(const std::string& s);

struct Hyperparams {
  double gamma = 0.95;
  double tau = 0.01;
  double lr_critic = 1e-3;   // also the DQN learning rate
  double lr_actor = 1e-4;
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_anneal_episodes = 50;
  double noise_sigma = 0.2;  // DDPG per-score exploration noise
  int hidden = 64;           // two hidden layers of this width
  int batch = 64;
  int replay_capacity = 10000;
  int target_sync = 200;     // DQN hard-copy period, in updates
};

// Mean squared error of Eq.-style critic targets: (1/m) sum (y - q)^2.
double critic_loss(const Eigen::VectorXd& q, const Eigen::VectorXd& y);

// Per-sample TD target: r if done, else r + gamma * bootstrap, where the
// bootstrap is max_a Q'(s') for DQN and Q'(s', mu'(s')) for DDPG.
Eigen::VectorXd td_target(const std::vector<const ReplayTransition*>& batch,
                          double gamma, const PolicyNetwork& q_target, Algo algo,
                          const PolicyNetwork* actor_target = nullptr);

// Learned defender over a discrete action set. DQN keeps a Q-network and a
// periodically hard-copied target; DDPG keeps actor/critic pairs with Polyak
// targets (the actor scores every discrete action; argmax executes).
class DefenderAgent {
 public:
  DefenderAgent(Algo algo, int state_dim, int n_actions, Hyperparams hp,
                std::uint64_t seed);

  Algo algo() const { return algo_; }
  int n_actions() const { return n_actions_; }
  int state_dim() const { return state_dim_; }
  const Hyperparams& hyperparams() const { return hp_; }

  // Greedy when explore is false; epsilon-greedy (DQN) or Gaussian score
  // noise (DDPG) when exploring.
  int select_action(const Eigen::VectorXd& x, bool explore, double epsilon, Rng& rng);

  void observe(ReplayTransition t) { buffer_.push(std::move(t)); }
  std::size_t buffered() const { return buffer_.size(); }

  // One minibatch update; no-op until the buffer holds a full batch.
  void update(Rng& rng);

  void save(const std::string& path) const;
  static DefenderAgent load(const std::string& path, Hyperparams hp = {});

  const PolicyNetwork& q_net() const { return q_; }
  const PolicyNetwork& actor_net() const { return actor_; }
  PolicyNetwork& q_net() { return q_; }
  PolicyNetwork& actor_net() { return actor_; }

 private:
  Eigen::VectorXd critic_input(const Eigen::VectorXd& state, int action) const;

  Algo algo_;
  int state_dim_ = 0;
  int n_actions_ = 0;
  Hyperparams hp_;
  ReplayBuffer buffer_;
  int updates_ = 0;

  // DQN: q_ / q_target_. DDPG: actor_/critic_ plus targets (q_ unused).
  PolicyNetwork q_, q_target_;
  PolicyNetwork actor_, actor_target_;
  PolicyNetwork critic_, critic_target_;
};

}  // namespace mdg
