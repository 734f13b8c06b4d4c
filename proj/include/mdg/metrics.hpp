#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mdg/game.hpp"

namespace mdg {

struct InvalidCounts : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Fraction of rollouts that ended in attacker success. n_total must be
// positive and at least n_success.
double asr(int n_success, int n_total);

// One training/evaluation episode's aggregate numbers.
struct EpisodeStats {
  int episode = 0;
  std::string algo;
  std::uint64_t seed = 0;
  double asr = 0;
  double mean_dr = 0;
  double mean_ar = 0;
};

// Reduce per-attacker rollout records to episode-level stats (ASR over
// rollouts, rewards averaged per rollout).
EpisodeStats aggregate(const std::vector<EpisodeRecord>& records);

// CSV with header episode,algo,seed,asr,mean_dr,mean_ar; six decimals.
void export_csv(const std::vector<EpisodeStats>& rows, const std::string& path);
std::vector<EpisodeStats> read_csv(const std::string& path);

// Two-panel SVG: ASR per episode on the left, mean defender reward on the
// right, one polyline per algorithm. Output is byte-deterministic.
std::string render_curves(const std::vector<EpisodeStats>& rows);
void write_curves(const std::vector<EpisodeStats>& rows, const std::string& path);

}  // namespace mdg
