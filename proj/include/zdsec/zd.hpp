#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "zdsec/game.hpp"

namespace zdsec {

// Parameters of the linear relation eta*U_d + beta*U_a + gamma = 0 together
// with the normalization phi that maps it onto a strategy:
//   pi_d(1) = phi * (eta*S^d + beta*S^a + gamma*1) + (1, 1, 0, 0).
// phi = sign / max_s |eta*U_s^d + beta*U_s^a + gamma|, sign +1 on the
// low-first branch and -1 on the mirrored branch; phi = 0 only in the
// degenerate all-on-the-line case where the strategy is (1,1,0,0) itself.
struct ZDParameters {
  double eta = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phi = 0.0;
};

// Which of the two separating-inequality branches admits the relation.
// kLowFirst: eta*U_s^d + beta*U_s^a + gamma <= 0 on states 11, 12 and >= 0 on
// 21, 22. kHighFirst is the mirror image. kBoth only when all four payoff
// points sit exactly on the line.
enum class FeasibleBranch { kNone, kLowFirst, kHighFirst, kBoth };
const char* branch_name(FeasibleBranch b);

inline constexpr double kFeasibilityTol = 1e-12;

// Feasibility of enforcing eta*U_d + beta*U_a + gamma = 0 with some defender
// strategy. Requires the payoff-ordering assumption; (0,0,0) is rejected as
// not a relation.
FeasibleBranch relation_feasible(const StageGame& game, double eta,
                                 double beta, double gamma);

// True when the (2,1) and (2,2) payoff points lie weakly on one common side
// of the line through the (1,1) and (1,2) payoff points (cross-product form,
// so vertical lines are fine). This is the existence criterion for ZD
// strategies under the ordering assumption.
bool zd_exists(const StageGame& game);

// Names the payoff points that straddle the line when zd_exists is false.
std::string zd_exists_diagnostic(const StageGame& game);

struct ZDConstruction {
  MemoryOneStrategy strategy;
  ZDParameters params;
  FeasibleBranch branch = FeasibleBranch::kNone;
};

// Builds the strategy enforcing the relation; FeasibilityError when
// relation_feasible rejects it.
ZDConstruction construct_zd(const StageGame& game, double eta, double beta,
                            double gamma);

// Named constructions, by what they enforce:
//  kAnchor11     — line through the (1,1) payoff point with slope k >= 0;
//                  steers a rational attacker to the mutual-target-1 outcome.
//  kEqualizer21  — eta = 0; pins the attacker's utility to U21^a.
//  kAnchor12     — line through the (1,2) payoff point, slope k chosen as the
//                  midpoint of the admissible slope interval.
//  kLine1112     — slope pinned so the line passes through both the (1,1) and
//                  (1,2) payoff points; the defense anchor against stubborn
//                  attackers (its stubborn-attacker value is exactly U11^d).
enum class NamedConstruction { kAnchor11, kEqualizer21, kAnchor12, kLine1112 };
const char* named_construction_name(NamedConstruction c);
std::optional<NamedConstruction> named_construction_from(const std::string&);

// k overrides the free slope where one exists (InputDomainError when outside
// the admissible interval); CaseMismatchError when the payoff table is
// outside the construction's case.
ZDConstruction named_zd(const StageGame& game, NamedConstruction which,
                        std::optional<double> k = std::nullopt);

// Strategy selectors mirroring the regime analysis:
// bounded-loss pick against rationality-leaning attackers (kAnchor11 when
// U11^d >= U22^d and U11^a >= U21^a, else kLine1112),
ZDConstruction zd_for_rational_mix(const StageGame& game);
// dominance pick against stubborn-leaning attackers (kLine1112),
ZDConstruction zd_for_stubborn_mix(const StageGame& game);
// and the three-case pick for a fully rational attacker (kAnchor11 /
// kEqualizer21 / kAnchor12).
ZDConstruction zd_for_full_rational(const StageGame& game);

// Max |eta*U_d + beta*U_a + gamma| over n_samples seeded uniform attacker
// strategies plus all 16 deterministic attacker policies. Deterministic given
// the seed; samples merge by max so the sweep parallelizes cleanly.
double verify_enforcement(const StageGame& game, const MemoryOneStrategy& zd,
                          const ZDParameters& params, int n_samples,
                          std::uint64_t seed);

// Feasibility core without the ordering-assumption gate. The defender
// self-equalizer family only has room in games that violate the ordering
// assumption, so its checks enter here.
FeasibleBranch relation_feasible_unchecked(const StageGame& game, double eta,
                                           double beta, double gamma);
ZDConstruction construct_zd_unchecked(const StageGame& game, double eta,
                                      double beta, double gamma);

}  // namespace zdsec
