#include "mdg/agents/agent.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace mdg {

const char* to_string(Algo a) {
  switch (a) {
    case Algo::Dqn: return "dqn";
    case Algo::Ddpg: return "ddpg";
    case Algo::RrDdpg: return "rrddpg";
  }
  return "?";
}

std::optional<Algo> algo_from_string(const std::string& s) {
  if (s == "dqn") return Algo::Dqn;
  if (s == "ddpg") return Algo::Ddpg;
  if (s == "rrddpg") return Algo::RrDdpg;
  return std::nullopt;
}

double critic_loss(const Eigen::VectorXd& q, const Eigen::VectorXd& y) {
  if (q.size() != y.size()) throw ShapeMismatchError("critic_loss: size mismatch");
  if (q.size() == 0) throw std::invalid_argument("critic_loss: empty batch");
  return (y - q).squaredNorm() / static_cast<double>(q.size());
}

namespace {

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

Eigen::VectorXd one_hot(int i, int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[i] = 1;
  return v;
}

}  // namespace

Eigen::VectorXd td_target(const std::vector<const ReplayTransition*>& batch,
                          double gamma, const PolicyNetwork& q_target, Algo algo,
                          const PolicyNetwork* actor_target) {
  Eigen::VectorXd y(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const ReplayTransition& t = *batch[j];
    if (t.done) {
      y[j] = t.reward;
      continue;
    }
    double bootstrap = 0;
    if (algo == Algo::Dqn) {
      bootstrap = q_target.forward(t.next_state).maxCoeff();
    } else {
      Eigen::VectorXd scores = actor_target->forward(t.next_state);
      Eigen::VectorXd input(t.next_state.size() + scores.size());
      input << t.next_state, one_hot(argmax(scores), static_cast<int>(scores.size()));
      bootstrap = q_target.forward(input)[0];
    }
    y[j] = t.reward + gamma * bootstrap;
  }
  return y;
}

DefenderAgent::DefenderAgent(Algo algo, int state_dim, int n_actions, Hyperparams hp,
                             std::uint64_t seed)
    : algo_(algo),
      state_dim_(state_dim),
      n_actions_(n_actions),
      hp_(hp),
      buffer_(static_cast<std::size_t>(hp.replay_capacity)) {
  Rng rng(Rng::derive(seed, 0xA11));
  std::vector<int> q_sizes{state_dim, hp.hidden, hp.hidden, n_actions};
  std::vector<int> actor_sizes{state_dim, hp.hidden, hp.hidden, n_actions};
  std::vector<int> critic_sizes{state_dim + n_actions, hp.hidden, hp.hidden, 1};
  if (algo == Algo::Dqn) {
    q_ = PolicyNetwork::random_init(q_sizes, rng);
    q_target_ = q_;
  } else {
    actor_ = PolicyNetwork::random_init(actor_sizes, rng);
    actor_target_ = actor_;
    critic_ = PolicyNetwork::random_init(critic_sizes, rng);
    critic_target_ = critic_;
  }
}

int DefenderAgent::select_action(const Eigen::VectorXd& x, bool explore,
                                 double epsilon, Rng& rng) {
  if (algo_ == Algo::Dqn) {
    if (explore && rng.uniform() < epsilon)
      return static_cast<int>(rng.index(static_cast<std::size_t>(n_actions_)));
    return argmax(q_.forward(x));
  }
  Eigen::VectorXd scores = actor_.forward(x);
  if (explore)
    for (int i = 0; i < scores.size(); ++i)
      scores[i] += rng.gaussian(0, hp_.noise_sigma);
  return argmax(scores);
}

Eigen::VectorXd DefenderAgent::critic_input(const Eigen::VectorXd& state, int action) const {
  Eigen::VectorXd input(state.size() + n_actions_);
  input << state, one_hot(action, n_actions_);
  return input;
}

void DefenderAgent::update(Rng& rng) {
  const int m = hp_.batch;
  if (buffer_.size() < static_cast<std::size_t>(m)) return;
  auto batch = buffer_.sample(static_cast<std::size_t>(m), rng);
  ++updates_;

  if (algo_ == Algo::Dqn) {
    Eigen::VectorXd y = td_target(batch, hp_.gamma, q_target_, Algo::Dqn);
    Eigen::MatrixXd x(state_dim_, m);
    for (int j = 0; j < m; ++j) x.col(j) = batch[j]->state;
    Eigen::MatrixXd q = q_.forward_batch(x);
    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(n_actions_, m);
    for (int j = 0; j < m; ++j) {
      int a = batch[j]->action;
      upstream(a, j) = 2.0 / m * (q(a, j) - y[j]);
    }
    q_.apply_gradients(q_.backward_batch(x, upstream), hp_.lr_critic);
    if (updates_ % hp_.target_sync == 0) q_target_ = q_;
    return;
  }

  // DDPG critic step on the Eq.-2 loss over executed (one-hot) actions.
  Eigen::VectorXd y = td_target(batch, hp_.gamma, critic_target_, Algo::Ddpg,
                                &actor_target_);
  Eigen::MatrixXd xc(state_dim_ + n_actions_, m);
  Eigen::MatrixXd xs(state_dim_, m);
  for (int j = 0; j < m; ++j) {
    xs.col(j) = batch[j]->state;
    xc.col(j) = critic_input(batch[j]->state, batch[j]->action);
  }
  Eigen::MatrixXd q = critic_.forward_batch(xc);
  Eigen::MatrixXd upstream(1, m);
  for (int j = 0; j < m; ++j) upstream(0, j) = 2.0 / m * (q(0, j) - y[j]);
  critic_.apply_gradients(critic_.backward_batch(xc, upstream), hp_.lr_critic);

  // Actor step: ascend the critic through the action input.
  Eigen::MatrixXd scores = actor_.forward_batch(xs);
  Eigen::MatrixXd xa(state_dim_ + n_actions_, m);
  xa.topRows(state_dim_) = xs;
  xa.bottomRows(n_actions_) = scores;
  Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(1, m, 1.0 / m);
  PolicyNetwork::Gradients gq = critic_.backward_batch(xa, ones);
  Eigen::MatrixXd dq_da = gq.input.bottomRows(n_actions_);
  actor_.apply_gradients(actor_.backward_batch(xs, -dq_da), hp_.lr_actor);

  soft_update(critic_target_, critic_, hp_.tau);
  soft_update(actor_target_, actor_, hp_.tau);
}

void DefenderAgent::save(const std::string& path) const {
  if (algo_ == Algo::Dqn) {
    save_networks({&q_, &q_target_}, static_cast<int>(algo_), path);
  } else {
    save_networks({&actor_, &actor_target_, &critic_, &critic_target_},
                  static_cast<int>(algo_), path);
  }
}

DefenderAgent DefenderAgent::load(const std::string& path, Hyperparams hp) {
  auto [tag, nets] = load_networks(path);
  if (tag < 0 || tag > 2) throw std::runtime_error("unknown algo tag in agent file");
  Algo algo = static_cast<Algo>(tag);
  if (algo == Algo::Dqn) {
    if (nets.size() != 2) throw std::runtime_error("corrupt DQN agent file");
    DefenderAgent agent(algo, nets[0].input_size(), nets[0].output_size(), hp, 0);
    agent.q_ = std::move(nets[0]);
    agent.q_target_ = std::move(nets[1]);
    return agent;
  }
  if (nets.size() != 4) throw std::runtime_error("corrupt DDPG agent file");
  DefenderAgent agent(algo, nets[0].input_size(), nets[0].output_size(), hp, 0);
  agent.actor_ = std::move(nets[0]);
  agent.actor_target_ = std::move(nets[1]);
  agent.critic_ = std::move(nets[2]);
  agent.critic_target_ = std::move(nets[3]);
  return agent;
}

}  // namespace mdg
