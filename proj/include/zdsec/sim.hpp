#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zdsec/game.hpp"

namespace zdsec {

enum class Learner { kFictitiousPlay, kQLearning };
const char* learner_name(Learner l);

// How the Q-learner mixes exploitation with the stubborn pull. kMixture: play
// the greedy action with probability lambda, the stubborn strategy's action
// otherwise. kUniform: greedy with probability lambda, a uniform action
// otherwise.
enum class QExploration { kMixture, kUniform };

struct SimulationConfig {
  long horizon = 100000;
  std::uint64_t seed = 1;
  double lambda = 0.0;
  StubbornStrategy stubborn;
  Learner learner = Learner::kFictitiousPlay;
  double eps1 = 0.1;   // Q-value step
  double eps2 = 0.01;  // average-reward step
  QExploration q_exploration = QExploration::kMixture;
  // Stream labels are prefixed with this, so sweep cells draw from disjoint
  // substreams of the same seed.
  std::string stream_prefix;

  SimulationConfig(StubbornStrategy st) : stubborn(st) {}
  void validate() const;
};

struct StageRecord {
  long t = 0;
  int state = 0;  // state entered at this stage's start (canonical index)
  int d = 0;      // defender action in {1,2}
  int a = 0;      // attacker action in {1,2}
  double r_d = 0.0;
  double r_a = 0.0;
  double u_d_avg = 0.0;  // running averages after this stage
  double u_a_avg = 0.0;
};

struct Trajectory {
  // Every stage for t <= 1000, every 100th afterwards, plus the final stage.
  std::vector<StageRecord> records;
  long horizon = 0;
  double u_d_final = 0.0;
  double u_a_final = 0.0;
  // Fictitious play: final frequency estimate of the defender strategy.
  MemoryOneStrategy pi_d_hat{};
  // Q-learning: final table and average-reward estimate.
  std::array<std::array<double, 2>, 4> q_table{};
  double r_bar_a = 0.0;
  std::string rng_id;
};

// Attacker learns the defender's conditional action frequencies and plays the
// lambda-mixture of the best response to the estimate with the stubborn
// strategy. The estimate starts uniform so a best response is always defined.
Trajectory run_fictitious_play(const StageGame& game,
                               const MemoryOneStrategy& pi_d,
                               const SimulationConfig& config);

// Tabular average-reward Q-learning attacker; tie-breaks argmax to action 1.
Trajectory run_q_learning(const StageGame& game, const MemoryOneStrategy& pi_d,
                          const SimulationConfig& config);

struct SweepCell {
  std::string label;
  double lambda = 0.0;
  Learner learner = Learner::kFictitiousPlay;
  double u_d_final = 0.0;
  double u_a_final = 0.0;
};

// Runs the configured learner for each (defender, lambda) cell; the cell's
// substream is derived deterministically from (config.seed, label, lambda).
std::vector<SweepCell> sweep_lambda(
    const StageGame& game,
    const std::vector<std::pair<std::string, MemoryOneStrategy>>& defenders,
    const std::vector<double>& lambdas, const SimulationConfig& config);

}  // namespace zdsec
