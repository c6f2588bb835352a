#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace zdsec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAssumption = 3;  // assumption/existence failure
inline constexpr int kExitInvariant = 4;   // invariant-suite failure

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::string lambda_grid;  // "start:stop:step" or comma list; "" = default
  int threads = 0;          // 0 = hardware concurrency

  // simulate
  long horizon = 0;  // 0 = config value
  std::vector<double> lambdas;
  std::string learners = "both";  // fp | q | both

  // sse
  double coarse_step = 0.0;  // 0 = config value
  int refine_rounds = -1;    // -1 = config value

  // zd
  std::string which = "auto-stubborn";

  // br
  std::string pi_d;
};

std::vector<double> parse_lambda_grid(const std::string& grid_spec,
                                      double default_step);

int cmd_analyze(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_simulate(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_sse(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_zd(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_br(const CliOptions& o, std::ostream& out, std::ostream& err);

}  // namespace zdsec
