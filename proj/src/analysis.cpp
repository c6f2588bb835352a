#include "zdsec/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace zdsec {

namespace {

constexpr Vec4 kOnes{1.0, 1.0, 1.0, 1.0};

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// A = U11^d minus the defender's stubborn-attacker closed-form value at pd.
double stubborn_edge(const StageGame& game, const MemoryOneStrategy& pd) {
  const double to21 = 1.0 - pd.p[kS11];
  const double to11 = pd.p[kS21];
  const double den = to21 + to11;
  if (den <= 0.0) return 0.0;  // absorbed in state 11: no edge
  const double val =
      (game.u_d[0][0] * to11 + game.u_d[1][0] * to21) / den;
  return game.u_d[0][0] - val;
}

// Per-defender determinant bundle entering the cross coefficients.
struct SideQuantities {
  double d_br_sd = 0.0;  // D(pd, BR, S^d)
  double d_br_1 = 0.0;   // D(pd, BR, 1)
  double d_st_sd = 0.0;  // D(pd, stubborn, S^d)
  double d_st_1 = 0.0;   // D(pd, stubborn, 1)
  double j_sd = 0.0;     // J(pd, stubborn, S^d)
  double j_1 = 0.0;      // J(pd, stubborn, 1)
};

SideQuantities side_quantities(const StageGame& game, const BrPack& pack,
                               const StubbornStrategy& stubborn) {
  const Vec4 sd = game.defender_payoffs();
  const MemoryOneStrategy& st = stubborn.strategy();
  SideQuantities q;
  q.d_br_sd = press_dyson_det(pack.strat, pack.br, sd);
  q.d_br_1 = press_dyson_det(pack.strat, pack.br, kOnes);
  q.d_st_sd = press_dyson_det(pack.strat, st, sd);
  q.d_st_1 = press_dyson_det(pack.strat, st, kOnes);
  q.j_sd = j_term(pack, st, sd);
  q.j_1 = j_term(pack, st, kOnes);
  return q;
}

CrossCoefficients cross_from(const SideQuantities& zd,
                             const SideQuantities& sse) {
  CrossCoefficients c;
  c.x1 = zd.d_br_sd * sse.j_1 + sse.d_br_1 * zd.j_sd -
         sse.d_br_sd * zd.j_1 - zd.d_br_1 * sse.j_sd;
  c.x2 = zd.d_st_sd * sse.j_1 + sse.d_st_1 * zd.j_sd -
         sse.d_st_sd * zd.j_1 - zd.d_st_1 * sse.j_sd;
  c.x3 = zd.j_sd * sse.j_1 - sse.j_sd * zd.j_1;
  // Best-response/stubborn determinant cross products of the exact
  // l^2(1-l)^2 coefficient.
  const double d_cross = sse.d_br_sd * zd.d_st_1 + sse.d_st_sd * zd.d_br_1 -
                         zd.d_br_sd * sse.d_st_1 - zd.d_st_sd * sse.d_br_1;
  c.x3_full = c.x3 - d_cross;
  return c;
}

}  // namespace

BrPack make_pack(const StageGame& game, const MemoryOneStrategy& strat) {
  return {strat, best_response(game, strat).policy};
}

double j_term(const BrPack& d, const MemoryOneStrategy& pi_a, const Vec4& f) {
  return press_dyson_det(d.strat, d.br, pi_a, f) +
         press_dyson_det(d.strat, pi_a, d.br, f);
}

double c_term(const BrPack& zd, const BrPack& sse,
              const StubbornStrategy& stubborn, double lambda) {
  const MemoryOneStrategy mix_zd = mixture_strategy(zd.br, stubborn, lambda);
  const MemoryOneStrategy mix_sse = mixture_strategy(sse.br, stubborn, lambda);
  return press_dyson_det(zd.strat, mix_zd, kOnes) *
         press_dyson_det(sse.strat, mix_sse, kOnes);
}

CrossCoefficients cross_coefficients(const StageGame& game, const BrPack& zd,
                                     const BrPack& sse,
                                     const StubbornStrategy& stubborn) {
  return cross_from(side_quantities(game, zd, stubborn),
                    side_quantities(game, sse, stubborn));
}

double g_cross_term(const CrossCoefficients& c, double lambda) {
  const double l = lambda, m = 1.0 - lambda;
  return l * l * l * m * c.x1 + l * m * m * m * c.x2 + l * l * m * m * c.x3;
}

double g_cross_term_full(const CrossCoefficients& c, double lambda) {
  const double l = lambda, m = 1.0 - lambda;
  return l * l * l * m * c.x1 + l * m * m * m * c.x2 +
         l * l * m * m * c.x3_full;
}

namespace {

// Perturbation sweep: +/-step around each coordinate of both strategies,
// clipped to [0,1], maximizing |x1|, |x2|, |x3| over the variant pairs. One
// refinement pass halves the step around each quantity's argmax pair.
struct SweepResult {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  std::pair<MemoryOneStrategy, MemoryOneStrategy> arg1, arg2, arg3;
};

std::vector<MemoryOneStrategy> variants(const MemoryOneStrategy& base,
                                        double step) {
  std::vector<MemoryOneStrategy> out;
  out.reserve(81);
  MemoryOneStrategy v;
  for (int i0 = -1; i0 <= 1; ++i0)
    for (int i1 = -1; i1 <= 1; ++i1)
      for (int i2 = -1; i2 <= 1; ++i2)
        for (int i3 = -1; i3 <= 1; ++i3) {
          v.p[0] = clamp01(base.p[0] + i0 * step);
          v.p[1] = clamp01(base.p[1] + i1 * step);
          v.p[2] = clamp01(base.p[2] + i2 * step);
          v.p[3] = clamp01(base.p[3] + i3 * step);
          out.push_back(v);
        }
  return out;
}

SweepResult sweep_pair(const StageGame& game, const MemoryOneStrategy& zd,
                       const MemoryOneStrategy& sse,
                       const StubbornStrategy& stubborn, double step) {
  const std::vector<MemoryOneStrategy> zds = variants(zd, step);
  const std::vector<MemoryOneStrategy> sses = variants(sse, step);
  std::vector<SideQuantities> zq, sq;
  zq.reserve(zds.size());
  sq.reserve(sses.size());
  for (const auto& v : zds)
    zq.push_back(side_quantities(game, make_pack(game, v), stubborn));
  for (const auto& v : sses)
    sq.push_back(side_quantities(game, make_pack(game, v), stubborn));

  SweepResult r;
  for (std::size_t i = 0; i < zds.size(); ++i) {
    for (std::size_t j = 0; j < sses.size(); ++j) {
      const CrossCoefficients c = cross_from(zq[i], sq[j]);
      const double a3 = std::max(std::abs(c.x3), std::abs(c.x3_full));
      if (std::abs(c.x1) > r.b1) r.b1 = std::abs(c.x1), r.arg1 = {zds[i], sses[j]};
      if (std::abs(c.x2) > r.b2) r.b2 = std::abs(c.x2), r.arg2 = {zds[i], sses[j]};
      if (a3 > r.b3) r.b3 = a3, r.arg3 = {zds[i], sses[j]};
    }
  }
  return r;
}

}  // namespace

AnalysisConstants compute_constants(const StageGame& game, const SSEResult& sse,
                                    const MemoryOneStrategy& zd,
                                    const StubbornStrategy& stubborn,
                                    double max_grid_step) {
  if (!(max_grid_step > 0.0 && max_grid_step <= 0.5))
    throw InputDomainError("max_grid_step must lie in (0, 0.5]");
  AnalysisConstants con;
  con.a_const = stubborn_edge(game, sse.pi_d_sse);

  const BrPack zdp = make_pack(game, zd);
  const BrPack ssep = make_pack(game, sse.pi_d_sse);
  const CrossCoefficients point = cross_coefficients(game, zdp, ssep, stubborn);
  con.b1_point = std::abs(point.x1);
  con.b2_point = std::abs(point.x2);
  con.b3_point = std::max(std::abs(point.x3), std::abs(point.x3_full));
  con.b_point = std::max({con.b1_point, con.b2_point, con.b3_point / 2.0});

  const SweepResult s1 =
      sweep_pair(game, zd, sse.pi_d_sse, stubborn, max_grid_step);
  con.b1 = s1.b1;
  con.b2 = s1.b2;
  con.b3 = s1.b3;
  const double half = max_grid_step * 0.5;
  const SweepResult r1 =
      sweep_pair(game, s1.arg1.first, s1.arg1.second, stubborn, half);
  const SweepResult r2 =
      sweep_pair(game, s1.arg2.first, s1.arg2.second, stubborn, half);
  const SweepResult r3 =
      sweep_pair(game, s1.arg3.first, s1.arg3.second, stubborn, half);
  con.b1 = std::max(con.b1, r1.b1);
  con.b2 = std::max(con.b2, r2.b2);
  con.b3 = std::max(con.b3, r3.b3);
  con.b_const = std::max({con.b1, con.b2, con.b3 / 2.0});

  // Exact vertex enumeration of max D(pd, pa1, pa2, 1) over the 12-cube.
  double dmax = -std::numeric_limits<double>::infinity();
  MemoryOneStrategy pd, pa1, pa2;
  for (int v = 0; v < (1 << 12); ++v) {
    for (int s = 0; s < 4; ++s) {
      pd.p[s] = (v >> s) & 1;
      pa1.p[s] = (v >> (4 + s)) & 1;
      pa2.p[s] = (v >> (8 + s)) & 1;
    }
    dmax = std::max(dmax, press_dyson_det(pd, pa1, pa2, kOnes));
  }
  con.d_one = dmax;
  return con;
}

std::pair<bool, bool> gamma_membership(double a_const, double b_const,
                                       double d_one, double u_d_sse,
                                       double u12_d, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InputDomainError("lambda outside [0,1]: " + std::to_string(lambda));
  const double l4 = lambda * lambda * lambda * lambda;
  const double m = 1.0 - lambda;
  const double m4 = m * m * m * m;
  const double cross = b_const * lambda * m;
  const bool g1 = (u_d_sse - u12_d) * d_one * l4 - a_const * m4 - cross >= 0.0;
  const bool g2 = (u12_d - u_d_sse) * d_one * l4 + a_const * m4 - cross >= 0.0;
  return {g1, g2};
}

double h_bound_with(const AnalysisConstants& con, const StageGame& game,
                    const SSEResult& sse, const BrPack& zd, const BrPack& ssep,
                    const StubbornStrategy& stubborn, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InputDomainError("lambda outside [0,1]: " + std::to_string(lambda));
  const double c_l = c_term(zd, ssep, stubborn, lambda);
  if (std::abs(c_l) < kHDenominatorTol)
    throw DegenerateDenominatorError(
        "normalization product C at lambda = " + std::to_string(lambda) +
        " is " + std::to_string(c_l));
  const double c_1 = c_term(zd, ssep, stubborn, 1.0);
  const double l4 = lambda * lambda * lambda * lambda;
  const double m = 1.0 - lambda;
  const double m4 = m * m * m * m;
  const double num = (sse.u_d_sse - game.u_d[0][1]) * c_1 * l4 -
                     con.a_const * m4 + con.b_const * lambda * m;
  return num / c_l;
}

double h_bound(const StageGame& game, const SSEResult& sse,
               const MemoryOneStrategy& zd, const StubbornStrategy& stubborn,
               double lambda) {
  const AnalysisConstants con = compute_constants(game, sse, zd, stubborn);
  return h_bound_with(con, game, sse, make_pack(game, zd),
                      make_pack(game, sse.pi_d_sse), stubborn, lambda);
}

bool regime_sufficient(const AnalysisConstants& con, const StageGame& game,
                       const SSEResult& sse, double lambda, RegimeSide which) {
  const double m = 1.0 - lambda;
  if (which == RegimeSide::kNearRational) {
    if (!(lambda >= 0.5 && lambda <= 1.0))
      throw InputDomainError("near-rational condition needs lambda in [1/2,1]");
    const double p21 = 1.0 - sse.pi_d_sse.p[kS11];  // pi_d^SSE(2|11)
    const double p121 = sse.pi_d_sse.p[kS21];       // pi_d^SSE(1|21)
    const double lhs =
        4.0 * (game.u_d[0][0] - game.u_d[1][0]) * p21 * m * m * m * m;
    const double rhs =
        (0.25 * (sse.u_d_sse - game.u_d[0][1]) * con.d_one - con.b_const) *
        (p21 + p121);
    return lhs <= rhs;
  }
  if (!(lambda >= 0.0 && lambda <= 0.5))
    throw InputDomainError("near-stubborn condition needs lambda in [0,1/2]");
  const double l4 = lambda * lambda * lambda * lambda;
  return 4.0 * (sse.u_d_sse - game.u_a[0][1]) * con.d_one * l4 <=
         0.25 * con.a_const - con.b_const;
}

bool regime_sufficient_near_stubborn_alt(const AnalysisConstants& con,
                                         const StageGame& game,
                                         const SSEResult& sse, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 0.5))
    throw InputDomainError("near-stubborn condition needs lambda in [0,1/2]");
  const double l4 = lambda * lambda * lambda * lambda;
  return 4.0 * (sse.u_d_sse - game.u_d[0][1]) * con.d_one * l4 <=
         0.25 * con.a_const - con.b_const;
}

std::vector<RegimeReport> compare_zd_sse(
    const StageGame& game, const SSEResult& sse, const MemoryOneStrategy& zd,
    const StubbornStrategy& stubborn, const std::vector<double>& lambda_grid,
    const AnalysisConstants& con) {
  const BrPack zdp = make_pack(game, zd);
  const BrPack ssep = make_pack(game, sse.pi_d_sse);
  const double u12d = game.u_d[0][1];
  const double c1 = c_term(zdp, ssep, stubborn, 1.0);

  std::vector<RegimeReport> out;
  out.reserve(lambda_grid.size());
  for (double l : lambda_grid) {
    RegimeReport rep;
    rep.lambda = l;
    const MemoryOneStrategy mix_zd = mixture_strategy(zdp.br, stubborn, l);
    const MemoryOneStrategy mix_sse = mixture_strategy(ssep.br, stubborn, l);
    rep.u_d_zd = long_run_utilities(game, zd, mix_zd).u_d;
    rep.u_d_sse_mix = long_run_utilities(game, sse.pi_d_sse, mix_sse).u_d;
    rep.gap = rep.u_d_sse_mix - rep.u_d_zd;
    std::tie(rep.in_gamma1, rep.in_gamma2) =
        gamma_membership(con.a_const, con.b_const, con.d_one, sse.u_d_sse,
                         u12d, l);
    std::tie(rep.in_gamma1_nominal, rep.in_gamma2_nominal) =
        gamma_membership(con.a_const, con.b_point, con.d_one, sse.u_d_sse,
                         u12d, l);
    try {
      const double h = h_bound_with(con, game, sse, zdp, ssep, stubborn, l);
      rep.h_bound = h;
      const double cl = c_term(zdp, ssep, stubborn, l);
      rep.h_flagged = std::abs(cl) < kHFlagTol ||
                      (c1 != 0.0 && std::signbit(cl) != std::signbit(c1));
    } catch (const DegenerateDenominatorError&) {
      rep.h_bound.reset();
      rep.h_flagged = true;
    }
    out.push_back(rep);
  }
  return out;
}

std::vector<RegimeReport> compare_zd_sse(const StageGame& game,
                                         const SSEResult& sse,
                                         const MemoryOneStrategy& zd,
                                         const StubbornStrategy& stubborn,
                                         const std::vector<double>& grid) {
  return compare_zd_sse(game, sse, zd, stubborn, grid,
                        compute_constants(game, sse, zd, stubborn));
}

}  // namespace zdsec
