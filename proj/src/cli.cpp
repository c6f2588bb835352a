#include "zdsec/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "zdsec/analysis.hpp"
#include "zdsec/best_response.hpp"
#include "zdsec/config.hpp"
#include "zdsec/report.hpp"
#include "zdsec/rng.hpp"
#include "zdsec/sim.hpp"
#include "zdsec/version.hpp"
#include "zdsec/zd.hpp"

namespace zdsec {

namespace {

namespace fs = std::filesystem;

std::vector<double> split_doubles(const std::string& s, char sep) {
  std::vector<double> out;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, sep)) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::string strategy_str(const MemoryOneStrategy& p) {
  return "(" + fmt_g(p.p[0]) + ", " + fmt_g(p.p[1]) + ", " + fmt_g(p.p[2]) +
         ", " + fmt_g(p.p[3]) + ")";
}

// Loads the config and checks the gates shared by the analysis commands:
// payoff ordering, stubborn-strategy shape. Returns nonzero exit code on
// failure.
int load_gated(const CliOptions& o, std::ostream& err, GameConfig& cfg,
               bool need_assumptions) {
  if (o.config_path.empty()) {
    err << "error: --config is required\n";
    return kExitUsage;
  }
  try {
    cfg = load_config(o.config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const std::string& w : cfg.warnings) err << "warning: " << w << "\n";
  if (need_assumptions) {
    const std::string v = cfg.game.assumption1_violation();
    if (!v.empty()) {
      err << "error: payoff ordering assumption fails: " << v << "\n";
      return kExitAssumption;
    }
    try {
      cfg.stubborn();
    } catch (const InputDomainError& e) {
      err << "error: " << e.what() << "\n";
      return kExitAssumption;
    }
  }
  return kExitOk;
}

RunManifest make_manifest(const std::string& command, const GameConfig& cfg,
                          std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.config_hash = cfg.config_hash;
  m.seed = seed;
  m.version = kVersion;
  m.timestamp = iso8601_utc_now();
  return m;
}

void stamp(Csv& csv, const RunManifest& m, const GameConfig& cfg) {
  csv.comment(std::string(kToolName) + " " + m.version + " " + m.command);
  csv.comment("run_id " + m.run_id());
  csv.comment("config " + fs::path(cfg.source_path).filename().string() +
              " hash " + cfg.config_hash);
  csv.comment("seed " + std::to_string(m.seed));
}

}  // namespace

std::vector<double> parse_lambda_grid(const std::string& grid_spec,
                                      double default_step) {
  std::vector<double> grid;
  if (grid_spec.empty()) {
    if (!(default_step > 0.0 && default_step <= 1.0))
      throw InputDomainError("lambda step must lie in (0,1]");
    for (double l = 0.0; l < 1.0 - 1e-12; l += default_step)
      grid.push_back(l);
    grid.push_back(1.0);
    return grid;
  }
  if (grid_spec.find(':') != std::string::npos) {
    const std::vector<double> parts = split_doubles(grid_spec, ':');
    if (parts.size() != 3)
      throw InputDomainError("lambda grid must be start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || stop < start)
      throw InputDomainError("bad lambda grid range");
    for (double l = start; l <= stop + 1e-12; l += step)
      grid.push_back(std::min(l, stop));
    if (!grid.empty() && grid.back() < stop - 1e-12) grid.push_back(stop);
  } else {
    grid = split_doubles(grid_spec, ',');
  }
  for (double l : grid)
    if (!(l >= 0.0 && l <= 1.0))
      throw InputDomainError("lambda outside [0,1] in grid");
  return grid;
}

int cmd_analyze(const CliOptions& o, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  if (int rc = load_gated(o, err, cfg, true)) return rc;
  const StageGame& game = cfg.game;
  const StubbornStrategy stubborn = cfg.stubborn();

  if (!zd_exists(game)) {
    err << "error: no ZD strategy exists for this game: "
        << zd_exists_diagnostic(game) << "\n";
    return kExitAssumption;
  }

  std::vector<double> grid;
  try {
    grid = parse_lambda_grid(o.lambda_grid, cfg.analysis.lambda_step);
  } catch (const InputDomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const SSEResult sse = solve_sse(game, cfg.solver.coarse_step,
                                  cfg.solver.refine_rounds, o.threads);
  const ZDConstruction zd_rat = zd_for_rational_mix(game);
  const ZDConstruction zd_stub = zd_for_stubborn_mix(game);
  const AnalysisConstants con = compute_constants(
      game, sse, zd_rat.strategy, stubborn, cfg.analysis.sweep_step);
  const auto rep_rat =
      compare_zd_sse(game, sse, zd_rat.strategy, stubborn, grid, con);
  const auto rep_stub =
      compare_zd_sse(game, sse, zd_stub.strategy, stubborn, grid, con);

  RunManifest man = make_manifest("analyze", cfg, o.seed);
  Csv csv;
  stamp(csv, man, cfg);
  csv.comment("u_d_sse_solver " + fmt_g(sse.u_d_sse) + " at pi_d " +
              strategy_str(sse.pi_d_sse));
  csv.comment("zd_rational " + strategy_str(zd_rat.strategy) +
              "  zd_stubborn " + strategy_str(zd_stub.strategy));
  csv.comment("constants A " + fmt_g(con.a_const) + " B " + fmt_g(con.b_const) +
              " (b1 " + fmt_g(con.b1) + " b2 " + fmt_g(con.b2) + " b3 " +
              fmt_g(con.b3) + ") B_point " + fmt_g(con.b_point) + " D1 " +
              fmt_g(con.d_one));
  csv.comment(
      "u_d_zd picks the stubborn-regime ZD inside certified gamma2, the "
      "rational-regime ZD inside certified gamma1, else the better of the "
      "two; H always refers to the rational-regime ZD");
  csv.columns({"lambda", "u_d_zd", "u_d_sse", "gap", "in_gamma1_certified",
               "in_gamma2_certified", "H"});

  Csv plot;
  plot.comment("columns: lambda u_d_zd u_d_sse gap in_gamma1 in_gamma2 H");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RegimeReport& rr = rep_rat[i];
    const RegimeReport& rs = rep_stub[i];
    double u_zd;
    if (rr.in_gamma2) u_zd = rs.u_d_zd;
    else if (rr.in_gamma1) u_zd = rr.u_d_zd;
    else u_zd = std::max(rr.u_d_zd, rs.u_d_zd);
    const double gap = rr.u_d_sse_mix - u_zd;
    const std::string h =
        rr.h_bound ? fmt_g(*rr.h_bound) : std::string("nan");
    csv.row({fmt_g(rr.lambda), fmt_g(u_zd), fmt_g(rr.u_d_sse_mix), fmt_g(gap),
             rr.in_gamma1 ? "1" : "0", rr.in_gamma2 ? "1" : "0", h});
    const std::string line = fmt_g(rr.lambda) + " " + fmt_g(u_zd) + " " +
                             fmt_g(rr.u_d_sse_mix) + " " + fmt_g(gap) + " " +
                             (rr.in_gamma1 ? "1" : "0") + std::string(" ") +
                             (rr.in_gamma2 ? "1" : "0") + " " + h;
    plot.row({line});
  }

  const fs::path dir(o.out_dir);
  atomic_write(dir / "analyze.csv", csv.str());
  atomic_write(dir / "analyze_plot.dat", plot.str());
  man.outputs = {"analyze.csv", "analyze_plot.dat"};
  write_manifest(dir, man);
  out << "analyze: " << grid.size() << " lambda rows -> "
      << (dir / "analyze.csv").string() << "\n";
  out << "u_d_sse = " << fmt_g(sse.u_d_sse) << ", A = " << fmt_g(con.a_const)
      << ", B = " << fmt_g(con.b_const) << ", D(1) = " << fmt_g(con.d_one)
      << "\n";
  return kExitOk;
}

int cmd_simulate(const CliOptions& o, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  if (int rc = load_gated(o, err, cfg, true)) return rc;
  const StageGame& game = cfg.game;
  const StubbornStrategy stubborn = cfg.stubborn();
  if (!zd_exists(game)) {
    err << "error: no ZD strategy exists for this game: "
        << zd_exists_diagnostic(game) << "\n";
    return kExitAssumption;
  }
  if (o.learners != "fp" && o.learners != "q" && o.learners != "both") {
    err << "error: --learners must be fp, q or both\n";
    return kExitUsage;
  }
  std::vector<double> lambdas = o.lambdas.empty() ? cfg.sim.lambdas : o.lambdas;
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0)) {
      err << "error: lambda outside [0,1]: " << l << "\n";
      return kExitUsage;
    }
  const long horizon = o.horizon > 0 ? o.horizon : cfg.sim.horizon;
  if (horizon < 1) {
    err << "error: horizon must be >= 1\n";
    return kExitUsage;
  }

  const SSEResult sse = solve_sse(game, cfg.solver.coarse_step,
                                  cfg.solver.refine_rounds, o.threads);
  const ZDConstruction zd_stub = zd_for_stubborn_mix(game);
  const ZDConstruction zd_rat = zd_for_rational_mix(game);

  std::vector<Learner> learners;
  if (o.learners != "q") learners.push_back(Learner::kFictitiousPlay);
  if (o.learners != "fp") learners.push_back(Learner::kQLearning);

  RunManifest man = make_manifest("simulate", cfg, o.seed);
  const fs::path dir(o.out_dir);

  Csv summary;
  stamp(summary, man, cfg);
  summary.comment("rng " + std::string(CounterRng::kGeneratorId));
  summary.columns(
      {"learner", "defender", "lambda", "horizon", "u_d_final", "u_a_final"});

  for (Learner learner : learners) {
    for (double l : lambdas) {
      const MemoryOneStrategy zd_pick =
          l < 0.5 ? zd_stub.strategy : zd_rat.strategy;
      const std::vector<std::pair<std::string, MemoryOneStrategy>> defenders =
          {{"zd", zd_pick}, {"sse", sse.pi_d_sse}};
      for (const auto& [label, pd] : defenders) {
        SimulationConfig sc(stubborn);
        sc.horizon = horizon;
        sc.seed = o.seed;
        sc.lambda = l;
        sc.learner = learner;
        sc.eps1 = cfg.sim.eps1;
        sc.eps2 = cfg.sim.eps2;
        sc.q_exploration = cfg.sim.q_exploration;
        char buf[96];
        std::snprintf(buf, sizeof buf, "cell:%s:%.17g:%s:", label.c_str(), l,
                      learner_name(learner));
        sc.stream_prefix = buf;
        const Trajectory traj = learner == Learner::kFictitiousPlay
                                    ? run_fictitious_play(game, pd, sc)
                                    : run_q_learning(game, pd, sc);
        Csv tcsv;
        stamp(tcsv, man, cfg);
        tcsv.comment("learner " + std::string(learner_name(learner)) +
                     " defender " + label + " lambda " + fmt_g(l) +
                     " horizon " + std::to_string(horizon));
        tcsv.comment("rng " + traj.rng_id);
        tcsv.columns({"stage", "u_d_avg"});
        for (const StageRecord& rec : traj.records)
          tcsv.row({std::to_string(rec.t), fmt_g(rec.u_d_avg)});
        char fname[128];
        std::snprintf(fname, sizeof fname, "traj_%s_%s_%s.csv",
                      learner_name(learner), label.c_str(), fmt_g(l).c_str());
        atomic_write(dir / fname, tcsv.str());
        man.outputs.push_back(fname);
        summary.row({learner_name(learner), label, fmt_g(l),
                     std::to_string(horizon), fmt_g(traj.u_d_final),
                     fmt_g(traj.u_a_final)});
      }
    }
  }
  atomic_write(dir / "summary.csv", summary.str());
  man.outputs.push_back("summary.csv");
  write_manifest(dir, man);
  out << "simulate: " << man.outputs.size() - 1 << " trajectory files -> "
      << dir.string() << "\n";
  return kExitOk;
}

namespace {

struct SuiteReport {
  std::ostream& out;
  bool all_ok = true;

  void check(const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    all_ok = all_ok && ok;
  }
};

}  // namespace

int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  if (int rc = load_gated(o, err, cfg, false)) return rc;
  const StageGame& game = cfg.game;

  // Assumption gate runs before any numeric suite.
  const std::string a1 = game.assumption1_violation();
  if (!a1.empty()) {
    err << "error: payoff ordering assumption fails: " << a1 << "\n";
    return kExitAssumption;
  }
  std::optional<StubbornStrategy> stubborn_opt;
  try {
    stubborn_opt = cfg.stubborn();
  } catch (const InputDomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssumption;
  }
  const StubbornStrategy& stubborn = *stubborn_opt;

  SuiteReport rep{out};

  {  // Determinant route vs stationary route.
    CounterRng rng(o.seed, "verify:routes");
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      MemoryOneStrategy pd, pa;
      for (int s = 0; s < 4; ++s) {
        pd.p[s] = rng.uniform(0.02, 0.98);
        pa.p[s] = rng.uniform(0.02, 0.98);
      }
      const UtilityPair ud = long_run_utilities(game, pd, pa);
      const UtilityPair us = utilities_via_stationary(game, pd, pa);
      worst = std::max({worst, std::abs(ud.u_d - us.u_d),
                        std::abs(ud.u_a - us.u_a)});
    }
    rep.check("determinant-vs-stationary", worst <= 1e-9,
              "max |delta| = " + fmt_g(worst) + " over 1000 pairs (tol 1e-9)");
  }

  {  // ZD enforcement for every named construction this game admits.
    bool any = false;
    for (NamedConstruction which :
         {NamedConstruction::kAnchor11, NamedConstruction::kEqualizer21,
          NamedConstruction::kAnchor12, NamedConstruction::kLine1112}) {
      ZDConstruction c;
      try {
        c = named_zd(game, which);
      } catch (const CaseMismatchError&) {
        continue;
      } catch (const FeasibilityError&) {
        continue;
      }
      any = true;
      const double r =
          verify_enforcement(game, c.strategy, c.params, 1000, o.seed);
      rep.check(std::string("zd-enforcement-") + named_construction_name(which),
                r <= 1e-9, "max residual = " + fmt_g(r) + " (tol 1e-9)");
    }
    if (!any)
      rep.check("zd-enforcement", false,
                "no named construction applies to this game");
  }

  {  // Best-response certificate.
    CounterRng rng(o.seed, "verify:br");
    double worst = -1.0;
    for (int i = 0; i < 20; ++i) {
      MemoryOneStrategy pd;
      for (int s = 0; s < 4; ++s) pd.p[s] = rng.next_double();
      worst = std::max(worst, best_response_certificate(game, pd, 0.1));
    }
    rep.check("br-certificate", worst <= 1e-9,
              "max grid improvement = " + fmt_g(worst) +
                  " over 20 defenders (tol 1e-9)");
  }

  {  // Determinant bilinearity in the attacker mixture.
    CounterRng rng(o.seed, "verify:bilinear");
    double worst = 0.0;
    const Vec4 sd = game.defender_payoffs();
    for (int i = 0; i < 200; ++i) {
      MemoryOneStrategy pd, a1v, a2v;
      for (int s = 0; s < 4; ++s) {
        pd.p[s] = rng.next_double();
        a1v.p[s] = rng.next_double();
        a2v.p[s] = rng.next_double();
      }
      const double l = rng.next_double();
      MemoryOneStrategy mix;
      for (int s = 0; s < 4; ++s)
        mix.p[s] = l * a1v.p[s] + (1.0 - l) * a2v.p[s];
      const Vec4& f = sd;
      const double lhs = press_dyson_det(pd, mix, f);
      const double rhs = l * l * press_dyson_det(pd, a1v, f) +
                         (1.0 - l) * (1.0 - l) * press_dyson_det(pd, a2v, f) +
                         l * (1.0 - l) *
                             (press_dyson_det(pd, a1v, a2v, f) +
                              press_dyson_det(pd, a2v, a1v, f));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    rep.check("determinant-bilinearity", worst <= 1e-10,
              "max residual = " + fmt_g(worst) + " (tol 1e-10)");
  }

  {  // Cross-term bound |g| <= B*lambda*(1-lambda).
    CounterRng rng(o.seed, "verify:crossterm");
    double worst = -1.0;
    for (int i = 0; i < 200; ++i) {
      MemoryOneStrategy x, y;
      for (int s = 0; s < 4; ++s) {
        x.p[s] = rng.next_double();
        y.p[s] = rng.next_double();
      }
      const double l = rng.next_double();
      const BrPack px = make_pack(game, x);
      const BrPack py = make_pack(game, y);
      const CrossCoefficients cc = cross_coefficients(game, px, py, stubborn);
      const double b = std::max({std::abs(cc.x1), std::abs(cc.x2),
                                 std::abs(cc.x3) / 2.0});
      const double g = g_cross_term(cc, l);
      worst = std::max(worst, std::abs(g) - b * l * (1.0 - l));
    }
    rep.check("cross-term-bound", worst <= 1e-9,
              "max |g| - B*l*(1-l) = " + fmt_g(worst) + " (tol 1e-9)");
  }

  if (cfg.mtd) {  // Template round trip.
    const StageGame g2 = expand_mtd(*cfg.mtd);
    bool same = true;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        same = same && g2.u_d[i][j] == game.u_d[i][j] &&
               g2.u_a[i][j] == game.u_a[i][j];
    rep.check("mtd-round-trip", same, "re-expansion matches exactly");
  }

  if (!rep.all_ok) {
    err << "verify: at least one invariant suite failed\n";
    return kExitInvariant;
  }
  out << "verify: all suites passed\n";
  return kExitOk;
}

int cmd_sse(const CliOptions& o, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  if (int rc = load_gated(o, err, cfg, true)) return rc;
  const double step =
      o.coarse_step > 0.0 ? o.coarse_step : cfg.solver.coarse_step;
  const int rounds =
      o.refine_rounds >= 0 ? o.refine_rounds : cfg.solver.refine_rounds;
  const SSEResult sse = solve_sse(cfg.game, step, rounds, o.threads);
  out << "pi_d_sse " << strategy_str(sse.pi_d_sse) << "\n";
  out << "pi_a_sse " << strategy_str(sse.pi_a_sse) << "\n";
  out << "u_d_sse " << fmt_g(sse.u_d_sse) << "\n";
  out << "u_a_sse " << fmt_g(sse.u_a_sse) << "\n";
  out << "evaluations " << sse.trace.evaluations << " final_step "
      << fmt_g(sse.trace.final_step) << "\n";
  return kExitOk;
}

int cmd_zd(const CliOptions& o, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  if (int rc = load_gated(o, err, cfg, true)) return rc;
  const StageGame& game = cfg.game;
  ZDConstruction c;
  try {
    if (o.which == "auto-stubborn") {
      c = zd_for_stubborn_mix(game);
    } else if (o.which == "auto-rational") {
      c = zd_for_rational_mix(game);
    } else if (auto named = named_construction_from(o.which)) {
      c = named_zd(game, *named);
    } else if (o.which.find(',') != std::string::npos) {
      const std::vector<double> abc = split_doubles(o.which, ',');
      if (abc.size() != 3) {
        err << "error: --which relation needs eta,beta,gamma\n";
        return kExitUsage;
      }
      c = construct_zd(game, abc[0], abc[1], abc[2]);
    } else {
      err << "error: unknown construction '" << o.which << "'\n";
      return kExitUsage;
    }
  } catch (const CaseMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const FeasibilityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssumption;
  }
  const double resid =
      verify_enforcement(game, c.strategy, c.params, 1000, o.seed);
  out << "strategy " << strategy_str(c.strategy) << "\n";
  out << "relation eta " << fmt_g(c.params.eta) << " beta "
      << fmt_g(c.params.beta) << " gamma " << fmt_g(c.params.gamma) << " phi "
      << fmt_g(c.params.phi) << "\n";
  out << "branch " << branch_name(c.branch) << "\n";
  out << "enforcement_residual " << fmt_g(resid) << " (1000 samples + 16 "
      << "deterministic policies, seed " << o.seed << ")\n";
  return kExitOk;
}

int cmd_br(const CliOptions& o, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  if (int rc = load_gated(o, err, cfg, true)) return rc;
  std::vector<double> p;
  {
    std::istringstream is(o.pi_d);
    double x;
    while (is >> x) p.push_back(x);
  }
  if (p.size() != 4) {
    err << "error: --pi-d needs four probabilities\n";
    return kExitUsage;
  }
  MemoryOneStrategy pd{{p[0], p[1], p[2], p[3]}};
  try {
    pd.validate();
  } catch (const InputDomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const BestResponseResult br = best_response(cfg.game, pd);
  out << "br_policy " << strategy_str(br.policy) << "\n";
  out << "attacker_value " << fmt_g(br.attacker_value) << "\n";
  out << "defender_value " << fmt_g(br.defender_value) << "\n";
  out << "tied_policies " << br.tied_set.size() << "\n";
  return kExitOk;
}

}  // namespace zdsec
