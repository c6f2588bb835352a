#pragma once

#include <cstdint>
#include <vector>

#include "zdsec/game.hpp"

namespace zdsec {

// One of the 16 deterministic attacker policies; a[s] in {1, 2}.
struct DeterministicAttackerPolicy {
  std::array<int, 4> a{1, 1, 1, 1};

  static DeterministicAttackerPolicy from_index(int idx);
  int index() const;
  MemoryOneStrategy to_strategy() const;
};

struct BestResponseResult {
  // Defender-favoring tie-broken best policy as a strategy.
  MemoryOneStrategy policy;
  // Max attacker value over all 16 deterministic policies.
  double attacker_value = 0.0;
  // Defender value of the tie-broken policy (max over the tied set).
  double defender_value = 0.0;
  std::vector<DeterministicAttackerPolicy> tied_set;
};

inline constexpr double kTieTol = 1e-9;

// Attacker's best response to a fixed defender strategy: the 4-state
// average-reward control problem, solved exactly by enumerating all 16
// deterministic stationary policies. Ties within kTieTol of the best attacker
// value break in the defender's favor (then by lowest policy index).
BestResponseResult best_response(const StageGame& game,
                                 const MemoryOneStrategy& pi_d);

// Max over a component-wise grid of stochastic attacker strategies of
// (grid value - best_response attacker value); validates that deterministic
// policies suffice. grid_step in (0, 0.5].
double best_response_certificate(const StageGame& game,
                                 const MemoryOneStrategy& pi_d,
                                 double grid_step);

struct SseTrace {
  double coarse_step = 0.0;
  int refine_rounds = 0;
  double final_step = 0.0;
  std::uint64_t evaluations = 0;
};

struct SSEResult {
  MemoryOneStrategy pi_d_sse;
  MemoryOneStrategy pi_a_sse;
  double u_d_sse = 0.0;
  double u_a_sse = 0.0;
  SseTrace trace;
};

inline constexpr double kSseClip = 1e-6;

// Strong Stackelberg equilibrium by grid search over defender strategies
// (each coordinate clipped to [kSseClip, 1 - kSseClip]) followed by local
// refinement that halves the step around the incumbent. Incumbents merge by
// (value, then lexicographically smaller strategy), so threaded and serial
// runs return bit-identical results. threads = 0 picks the hardware count.
SSEResult solve_sse(const StageGame& game, double coarse_step,
                    int refine_rounds, int threads = 0);

// Closed-form SSE defender value for the case U11^d < U22^d, U11^a >= U21^a:
// the defender value at attacker utility U21^a on the line through the (1,1)
// and (2,2) payoff points.
double sse_value_case2(const StageGame& game);

}  // namespace zdsec
