#include "mdg/agents/net.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace mdg {

namespace {
constexpr std::uint32_t kMagic = 0x4147444d;  // "MDGA"
constexpr std::uint32_t kVersion = 1;
}  // namespace

PolicyNetwork PolicyNetwork::zeros(std::vector<int> layer_sizes) {
  if (layer_sizes.size() < 2)
    throw ArchitectureMismatchError("need at least input and output layers");
  PolicyNetwork net;
  net.sizes = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    net.weights.emplace_back(Eigen::MatrixXd::Zero(net.sizes[l + 1], net.sizes[l]));
    net.biases.emplace_back(Eigen::VectorXd::Zero(net.sizes[l + 1]));
  }
  return net;
}

PolicyNetwork PolicyNetwork::random_init(std::vector<int> layer_sizes, Rng& rng,
                                         double scale) {
  PolicyNetwork net = zeros(std::move(layer_sizes));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (int i = 0; i < net.weights[l].rows(); ++i)
      for (int j = 0; j < net.weights[l].cols(); ++j)
        net.weights[l](i, j) = rng.uniform(-scale, scale);
  }
  return net;
}

Eigen::MatrixXd PolicyNetwork::forward_batch(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_size())
    throw ShapeMismatchError("forward: input has " + std::to_string(x.rows()) +
                             " rows, expected " + std::to_string(input_size()));
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < weights.size()) a = a.array().tanh();
  }
  return a;
}

Eigen::VectorXd PolicyNetwork::forward(const Eigen::VectorXd& x) const {
  return forward_batch(x);
}

PolicyNetwork::Gradients PolicyNetwork::backward_batch(
    const Eigen::MatrixXd& x, const Eigen::MatrixXd& upstream) const {
  if (x.rows() != input_size())
    throw ShapeMismatchError("backward: bad input rows");
  if (upstream.rows() != output_size() || upstream.cols() != x.cols())
    throw ShapeMismatchError("backward: bad upstream shape");

  // Forward pass keeping activations.
  std::vector<Eigen::MatrixXd> acts{x};
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::MatrixXd z = (weights[l] * acts.back()).colwise() + biases[l];
    if (l + 1 < weights.size()) z = z.array().tanh();
    acts.push_back(std::move(z));
  }

  Gradients g;
  g.weights.resize(weights.size());
  g.biases.resize(weights.size());
  Eigen::MatrixXd delta = upstream;  // output layer is linear
  for (std::size_t l = weights.size(); l-- > 0;) {
    g.weights[l] = delta * acts[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    Eigen::MatrixXd back = weights[l].transpose() * delta;
    if (l > 0) back = back.array() * (1.0 - acts[l].array().square());
    delta = std::move(back);
  }
  g.input = std::move(delta);
  return g;
}

PolicyNetwork::Gradients PolicyNetwork::gradients(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& upstream) const {
  return backward_batch(x, upstream);
}

void PolicyNetwork::apply_gradients(const Gradients& g, double lr) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] -= lr * g.weights[l];
    biases[l] -= lr * g.biases[l];
  }
}

double PolicyNetwork::max_param_distance(const PolicyNetwork& other) const {
  double d = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    d = std::max(d, (weights[l] - other.weights[l]).cwiseAbs().maxCoeff());
    d = std::max(d, (biases[l] - other.biases[l]).cwiseAbs().maxCoeff());
  }
  return d;
}

void soft_update(PolicyNetwork& target, const PolicyNetwork& source, double tau) {
  if (!target.same_architecture(source))
    throw ArchitectureMismatchError("soft_update across different architectures");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * source.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * source.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

namespace {

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated agent file");
  return v;
}

}  // namespace

void save_networks(const std::vector<const PolicyNetwork*>& nets, int algo_tag,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_pod(out, kMagic);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(algo_tag));
  write_pod(out, static_cast<std::uint32_t>(nets.size()));
  for (const PolicyNetwork* net : nets) {
    write_pod(out, static_cast<std::uint32_t>(net->sizes.size()));
    for (int s : net->sizes) write_pod(out, static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < net->weights.size(); ++l) {
      for (int i = 0; i < net->weights[l].rows(); ++i)
        for (int j = 0; j < net->weights[l].cols(); ++j)
          write_pod(out, net->weights[l](i, j));
      for (int i = 0; i < net->biases[l].size(); ++i)
        write_pod(out, net->biases[l](i));
    }
  }
}

std::pair<int, std::vector<PolicyNetwork>> load_networks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  if (read_pod<std::uint32_t>(in) != kMagic)
    throw std::runtime_error("not an agent file: " + path);
  if (read_pod<std::uint32_t>(in) != kVersion)
    throw std::runtime_error("unsupported agent file version");
  int algo_tag = static_cast<int>(read_pod<std::uint32_t>(in));
  auto count = read_pod<std::uint32_t>(in);
  std::vector<PolicyNetwork> nets;
  for (std::uint32_t n = 0; n < count; ++n) {
    auto n_sizes = read_pod<std::uint32_t>(in);
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i < n_sizes; ++i)
      sizes.push_back(static_cast<int>(read_pod<std::uint32_t>(in)));
    PolicyNetwork net = PolicyNetwork::zeros(sizes);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      for (int i = 0; i < net.weights[l].rows(); ++i)
        for (int j = 0; j < net.weights[l].cols(); ++j)
          net.weights[l](i, j) = read_pod<double>(in);
      for (int i = 0; i < net.biases[l].size(); ++i)
        net.biases[l](i) = read_pod<double>(in);
    }
    nets.push_back(std::move(net));
  }
  return {algo_tag, std::move(nets)};
}

}  // namespace mdg
