#pragma once

#include <optional>
#include <vector>

#include "zdsec/best_response.hpp"
#include "zdsec/game.hpp"
#include "zdsec/zd.hpp"

namespace zdsec {

// A defender strategy bundled with its (defender-favoring) best response.
struct BrPack {
  MemoryOneStrategy strat;
  MemoryOneStrategy br;
};
BrPack make_pack(const StageGame& game, const MemoryOneStrategy& strat);

// J(pi_d, pi_a, f) = D(pi_d, BR(pi_d), pi_a, f) + D(pi_d, pi_a, BR(pi_d), f).
double j_term(const BrPack& d, const MemoryOneStrategy& pi_a, const Vec4& f);

// C(zd, sse, stubborn, lambda): product of the two normalization determinants
// at the lambda-mixed attackers.
double c_term(const BrPack& zd, const BrPack& sse,
              const StubbornStrategy& stubborn, double lambda);

// Coefficients of the cross term g in the quartic expansion of the product
// difference: g = l^3(1-l) x1 + l(1-l)^3 x2 + l^2(1-l)^2 x3. x3 is the
// J-product coefficient alone; the exact product-difference expansion also
// carries four best-response/stubborn determinant cross products in the
// l^2(1-l)^2 slot, kept in x3_full. Both are bounded by the certified
// constants so the regime certificates stay sound either way.
struct CrossCoefficients {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;       // J-products only
  double x3_full = 0.0;  // exact coefficient: x3 minus the D cross block
};
CrossCoefficients cross_coefficients(const StageGame& game, const BrPack& zd,
                                     const BrPack& sse,
                                     const StubbornStrategy& stubborn);
double g_cross_term(const CrossCoefficients& c, double lambda);
// Exact cross term: product difference = l^4(...) + (1-l)^4(...) minus this.
double g_cross_term_full(const CrossCoefficients& c, double lambda);

struct AnalysisConstants {
  double a_const = 0.0;  // defender's stubborn-attacker edge at the SSE
  // Certified constants: maxima over the strategy-perturbation sweep.
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b_const = 0.0;  // max{b1, b2, b3/2}, exactly
  // Nominal constants: the same quantities at the given pair only.
  double b1_point = 0.0;
  double b2_point = 0.0;
  double b3_point = 0.0;
  double b_point = 0.0;
  // Max over all strategy triples of the normalization determinant; exact
  // (the determinant is affine in each of the 12 entries, so the max sits at
  // a vertex of the 2^12 cube).
  double d_one = 0.0;
};

// A at the computed SSE strategy; b-constants at the (sse, zd) pair plus a
// +/-max_grid_step perturbation sweep of both strategies with one halving
// refinement around each argmax; d_one by exact vertex enumeration.
AnalysisConstants compute_constants(const StageGame& game, const SSEResult& sse,
                                    const MemoryOneStrategy& zd,
                                    const StubbornStrategy& stubborn,
                                    double max_grid_step = 0.1);

// The two quartic regime inequalities at lambda, evaluated as written:
//   gamma1: (u_sse - U12^d) d1 l^4 - a (1-l)^4 - b l(1-l) >= 0
//   gamma2: (U12^d - u_sse) d1 l^4 + a (1-l)^4 - b l(1-l) >= 0
std::pair<bool, bool> gamma_membership(double a_const, double b_const,
                                       double d_one, double u_d_sse,
                                       double u12_d, double lambda);

// Loss bound for the rationality-leaning regime:
//   [ (u_sse - U12^d) C(zd,sse,*,1) l^4 - A(1-l)^4 + B l(1-l) ] / C(zd,sse,*,l)
// DegenerateDenominatorError when |C(...,l)| < 1e-12.
double h_bound(const StageGame& game, const SSEResult& sse,
               const MemoryOneStrategy& zd, const StubbornStrategy& stubborn,
               double lambda);
double h_bound_with(const AnalysisConstants& con, const StageGame& game,
                    const SSEResult& sse, const BrPack& zd, const BrPack& ssep,
                    const StubbornStrategy& stubborn, double lambda);

// Which half-interval sufficient condition to evaluate.
enum class RegimeSide { kNearRational, kNearStubborn };

// Sufficient conditions for the regime memberships, evaluated verbatim.
// kNearRational needs lambda in [1/2, 1]; kNearStubborn lambda in [0, 1/2].
bool regime_sufficient(const AnalysisConstants& con, const StageGame& game,
                       const SSEResult& sse, double lambda, RegimeSide which);
// The near-stubborn condition as printed uses U12^a on its left side where
// the regime definition uses U12^d; this is the U12^d alternate reading.
bool regime_sufficient_near_stubborn_alt(const AnalysisConstants& con,
                                         const StageGame& game,
                                         const SSEResult& sse, double lambda);

struct RegimeReport {
  double lambda = 0.0;
  bool in_gamma1 = false;          // certified (swept constants)
  bool in_gamma2 = false;
  bool in_gamma1_nominal = false;  // point constants
  bool in_gamma2_nominal = false;
  std::optional<double> h_bound;   // empty when the denominator degenerates
  bool h_flagged = false;          // |C| < 1e-6 or C sign differs from C(.,1)
  double u_d_zd = 0.0;
  double u_d_sse_mix = 0.0;
  double gap = 0.0;                // u_d_sse_mix - u_d_zd
};

// End-to-end comparison across lambda: best responses to both defenders,
// Definition-style mixtures with the stubborn strategy, long-run utilities,
// regime memberships and the loss bound.
std::vector<RegimeReport> compare_zd_sse(const StageGame& game,
                                         const SSEResult& sse,
                                         const MemoryOneStrategy& zd,
                                         const StubbornStrategy& stubborn,
                                         const std::vector<double>& lambda_grid);
std::vector<RegimeReport> compare_zd_sse(const StageGame& game,
                                         const SSEResult& sse,
                                         const MemoryOneStrategy& zd,
                                         const StubbornStrategy& stubborn,
                                         const std::vector<double>& lambda_grid,
                                         const AnalysisConstants& constants);

inline constexpr double kHDenominatorTol = 1e-12;
inline constexpr double kHFlagTol = 1e-6;

}  // namespace zdsec
