#pragma once

#include "mdg/rng.hpp"

namespace mdg {

// Family of affine reward perturbations used while training the randomized
// defender. Each episode draws one (a, b) pair; each reward then keeps its
// original value with probability p and becomes a*r + b otherwise.
struct RewardFamily {
  double a_lo = 0.5, a_hi = 2.0;
  double b_lo = -2.0, b_hi = 2.0;
  double p = 0.5;   // probability a reward passes through unchanged
  double f = 0.2;   // trailing fraction of episodes fine-tuned without noise
};

struct AffineMap {
  double a = 1.0;
  double b = 0.0;
};

AffineMap sample_map(const RewardFamily& family, Rng& rng);

double randomize_reward(double r, const RewardFamily& family, const AffineMap& map,
                        Rng& rng);

}  // namespace mdg
