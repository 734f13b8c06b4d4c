#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdg/rng.hpp"

namespace mdg {

struct ShapeMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArchitectureMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small fully-connected network: tanh hidden layers, linear output, explicit
// parameters. Forward/backward are written out by hand; Eigen carries the
// matrix arithmetic.
struct PolicyNetwork {
  std::vector<int> sizes;                 // [input, hidden..., output]
  std::vector<Eigen::MatrixXd> weights;   // weights[l]: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases;

  static PolicyNetwork zeros(std::vector<int> layer_sizes);
  static PolicyNetwork random_init(std::vector<int> layer_sizes, Rng& rng,
                                   double scale = 0.1);

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  // Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    Eigen::MatrixXd input;  // gradient w.r.t. the inputs
  };

  // Reverse-mode gradients of sum_j upstream_j . output_j over the batch.
  Gradients backward_batch(const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& upstream) const;
  Gradients gradients(const Eigen::VectorXd& x,
                      const Eigen::VectorXd& upstream) const;

  // Plain SGD step: p -= lr * g.
  void apply_gradients(const Gradients& g, double lr);

  bool same_architecture(const PolicyNetwork& other) const { return sizes == other.sizes; }
  double max_param_distance(const PolicyNetwork& other) const;

  bool operator==(const PolicyNetwork&) const = default;
};

// Both Polyak lines: target <- tau * source + (1 - tau) * target.
void soft_update(PolicyNetwork& target, const PolicyNetwork& source, double tau);

// Little-endian binary round-trip with a versioned header.
void save_networks(const std::vector<const PolicyNetwork*>& nets, int algo_tag,
                   const std::string& path);
std::pair<int, std::vector<PolicyNetwork>> load_networks(const std::string& path);

}  // namespace mdg
