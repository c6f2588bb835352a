#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "zdsec/cli.hpp"
#include "zdsec/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zero-determinant defense analysis for two-target stochastic "
               "Stackelberg security games"};
  app.set_version_flag("--version", std::string(zdsec::kVersion));
  app.require_subcommand(1);

  zdsec::CliOptions o;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "config file path");
    sub->add_option("--seed", o.seed, "seed for every randomized step");
    sub->add_option("--out-dir", o.out_dir, "output directory");
    sub->add_option("--lambda-grid", o.lambda_grid,
                    "start:stop:step or comma list");
    sub->add_option("--threads", o.threads, "worker cap (0 = hardware)");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "SSE vs ZD comparison across lambda, CSV + plot data");
  add_common(analyze);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "learning-attacker trajectories for ZD and SSE defenders");
  add_common(simulate);
  simulate->add_option("--horizon", o.horizon, "stages per cell");
  simulate->add_option("--lambdas", o.lambdas, "lambda values");
  simulate->add_option("--learners", o.learners, "fp | q | both");

  CLI::App* verify = app.add_subcommand(
      "verify", "run the numeric invariant suites against the config's game");
  add_common(verify);

  CLI::App* sse = app.add_subcommand("sse", "solve the Stackelberg problem");
  add_common(sse);
  sse->add_option("--coarse-step", o.coarse_step, "grid step");
  sse->add_option("--refine-rounds", o.refine_rounds, "refinement rounds");

  CLI::App* zd = app.add_subcommand("zd", "build a ZD strategy");
  add_common(zd);
  zd->add_option("--which", o.which,
                 "anchor11 | equalizer21 | anchor12 | line1112 | "
                 "auto-rational | auto-stubborn | eta,beta,gamma");

  CLI::App* br = app.add_subcommand("br", "attacker best response");
  add_common(br);
  br->add_option("--pi-d", o.pi_d, "defender strategy, four probabilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return zdsec::kExitUsage;
  }

  try {
    if (analyze->parsed()) return zdsec::cmd_analyze(o, std::cout, std::cerr);
    if (simulate->parsed()) return zdsec::cmd_simulate(o, std::cout, std::cerr);
    if (verify->parsed()) return zdsec::cmd_verify(o, std::cout, std::cerr);
    if (sse->parsed()) return zdsec::cmd_sse(o, std::cout, std::cerr);
    if (zd->parsed()) return zdsec::cmd_zd(o, std::cout, std::cerr);
    if (br->parsed()) return zdsec::cmd_br(o, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return zdsec::kExitUsage;
  }
  return zdsec::kExitUsage;
}
