#include "mdg/agents/reward_random.hpp"

namespace mdg {

AffineMap sample_map(const RewardFamily& family, Rng& rng) {
  return {rng.uniform(family.a_lo, family.a_hi), rng.uniform(family.b_lo, family.b_hi)};
}

double randomize_reward(double r, const RewardFamily& family, const AffineMap& map,
                        Rng& rng) {
  if (rng.uniform() >= 1.0 - family.p) return r;
  return map.a * r + map.b;
}

}  // namespace mdg
