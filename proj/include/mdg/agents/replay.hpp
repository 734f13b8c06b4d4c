#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mdg/rng.hpp"

namespace mdg {

struct ReplayTransition {
  Eigen::VectorXd state;       // phi(S)
  int action = 0;              // defense action index
  double reward = 0;
  Eigen::VectorXd next_state;  // phi(S')
  bool done = false;
};

// Fixed-capacity ring with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(ReplayTransition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const ReplayTransition& operator[](std::size_t i) const { return items_[i]; }

  std::vector<const ReplayTransition*> sample(std::size_t m, Rng& rng) const {
    std::vector<const ReplayTransition*> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
      out.push_back(&items_[rng.index(items_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<ReplayTransition> items_;
};

}  // namespace mdg
