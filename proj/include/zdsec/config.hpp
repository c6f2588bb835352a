#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zdsec/game.hpp"
#include "zdsec/sim.hpp"

namespace zdsec {

// Moving-target-defense template: per-state linear rewards R_s = x1_s*theta +
// x0_s, minus the defender's move cost Y (halved, attributed to the target it
// moved away from) and the attacker's strike cost C per target.
struct MtdParams {
  double y1 = 0.0;
  double y2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double theta = 0.0;  // in [0, 1]
  Vec4 d1{}, d0{};     // defender reward coefficients per state 11,12,21,22
  Vec4 a1{}, a0{};     // attacker reward coefficients
};

StageGame expand_mtd(const MtdParams& p);

struct SolverOptions {
  double coarse_step = 0.1;
  int refine_rounds = 6;
};

struct AnalysisOptions {
  double lambda_step = 0.01;
  double sweep_step = 0.1;  // perturbation sweep for the certified constants
};

struct SimOptions {
  long horizon = 100000;
  double eps1 = 0.1;
  double eps2 = 0.01;
  std::vector<double> lambdas{0.1, 0.2, 0.8, 0.9};
  QExploration q_exploration = QExploration::kMixture;
};

struct GameConfig {
  StageGame game;
  std::optional<MtdParams> mtd;  // set when the game came from the template
  MemoryOneStrategy stubborn_raw = strategy(1.0, 0.5, 1.0, 0.5);
  SolverOptions solver;
  AnalysisOptions analysis;
  SimOptions sim;
  // Assumption violations are warnings at load time; commands that need them
  // re-check and fail with exit code 3.
  std::vector<std::string> warnings;
  std::string source_path;
  std::string config_hash;  // fnv1a-64 hex of the raw config bytes

  StubbornStrategy stubborn() const { return StubbornStrategy(stubborn_raw); }
};

// Key/value config with [section] headers and '#' comments; vectors are
// whitespace-separated, matrices use ';' between rows. Grammar in the README.
GameConfig load_config(const std::string& path);
GameConfig parse_config(const std::string& text, const std::string& path);

}  // namespace zdsec
