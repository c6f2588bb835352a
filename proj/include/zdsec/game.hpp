#pragma once

#include <optional>
#include <string>

#include "zdsec/errors.hpp"
#include "zdsec/linalg4.hpp"

namespace zdsec {

// Canonical state order everywhere: the state is (previous defender target,
// previous attacker target).
enum State : int { kS11 = 0, kS12 = 1, kS21 = 2, kS22 = 3 };
inline constexpr const char* kStateNames[4] = {"11", "12", "21", "22"};

// State index for joint action (d, a), actions in {1, 2}.
inline int state_of(int d, int a) { return (d - 1) * 2 + (a - 1); }

// One-shot payoff tables. u_d[i][j] / u_a[i][j] are the defender's and
// attacker's utilities when the defender protects target i+1 and the attacker
// hits target j+1.
struct StageGame {
  std::array<std::array<double, 2>, 2> u_d{};
  std::array<std::array<double, 2>, 2> u_a{};

  double ud(int d, int a) const { return u_d[d - 1][a - 1]; }
  double ua(int d, int a) const { return u_a[d - 1][a - 1]; }

  // Payoff vectors S^d, S^a in canonical state order (11, 12, 21, 22).
  Vec4 defender_payoffs() const {
    return {u_d[0][0], u_d[0][1], u_d[1][0], u_d[1][1]};
  }
  Vec4 attacker_payoffs() const {
    return {u_a[0][0], u_a[0][1], u_a[1][0], u_a[1][1]};
  }

  double defender_min() const;
  double defender_max() const;
  double attacker_min() const;
  double attacker_max() const;

  bool finite() const;

  // Empty string when the payoff-ordering assumption holds:
  // min{U11^d, U22^d} > max{U12^d, U21^d}, U11^a < U12^a, U22^a < U21^a.
  // Otherwise names the first failing inequality.
  std::string assumption1_violation() const;
  bool satisfies_assumption1() const { return assumption1_violation().empty(); }

  // Throws PreconditionError when the ordering assumption fails.
  void require_assumption1() const;
};

// Payoff vectors bundled in canonical state order.
struct PayoffVectors {
  Vec4 s_d{};
  Vec4 s_a{};
};
inline PayoffVectors payoff_vectors(const StageGame& g) {
  return {g.defender_payoffs(), g.attacker_payoffs()};
}

// Memory-one strategy: p[s] = probability of playing action 1 in state s.
struct MemoryOneStrategy {
  Vec4 p{};

  double operator[](int s) const { return p[s]; }
  double& operator[](int s) { return p[s]; }

  // InputDomainError when a component leaves [0,1] by more than tol.
  void validate(double tol = 1e-12) const;
  // Clamps floating-point dust onto [0,1]; validate() first.
  MemoryOneStrategy clamped() const;

  bool operator==(const MemoryOneStrategy&) const = default;
};

inline MemoryOneStrategy strategy(double p11, double p12, double p21,
                                  double p22) {
  return MemoryOneStrategy{{p11, p12, p21, p22}};
}

// Attacker strategy committed to target 1 after it attacked target 1:
// p[11] = p[21] = 1.
struct StubbornStrategy {
  explicit StubbornStrategy(MemoryOneStrategy m);
  const MemoryOneStrategy& strategy() const { return s_; }
  double operator[](int s) const { return s_.p[s]; }

 private:
  MemoryOneStrategy s_;
};

// lambda-mixture of a best response and a stubborn strategy (the boundedly
// rational attacker model).
struct MixtureAttacker {
  double lambda = 0.0;
  StubbornStrategy stubborn;

  MixtureAttacker(double l, StubbornStrategy st);
};

// Pointwise convex combination lambda*br + (1-lambda)*stubborn.
MemoryOneStrategy mixture_strategy(const MemoryOneStrategy& br,
                                   const StubbornStrategy& stubborn,
                                   double lambda);

// Row-stochastic 4x4 chain over the canonical states. When built from a
// strategy pair the pair is kept so perturbations can act on the strategies.
struct MarkovChain {
  Mat4 m{};
  std::optional<std::pair<MemoryOneStrategy, MemoryOneStrategy>> strategies;
};

MarkovChain build_chain(const MemoryOneStrategy& pi_d,
                        const MemoryOneStrategy& pi_a);

enum class Route {
  kStationary,
  kDeterminant,
  kStubbornClosedForm,
  kPerturbedLimit,
};
const char* route_name(Route r);

struct StationaryResult {
  Vec4 v{};
  Route route = Route::kStationary;
};

// Stationary distribution by direct linear solve of (M^T - I)v = 0 with the
// normalization row replacing one equation. Chains with several recurrent
// classes get the epsilon-uniform perturbed limit instead, route-flagged.
StationaryResult stationary_distribution(const MarkovChain& chain);

// The epsilon->0 limit of the stationary distribution of the chain whose
// strategies (rows, when no strategies are attached) are mixed with the
// uniform strategy at rate epsilon. Exact: recurrent classes are decomposed
// combinatorially and recombined by their first-order exchange fluxes.
Vec4 perturbed_limit_distribution(const MarkovChain& chain);

// Numerical stationary distribution of the epsilon-mixed chain; test oracle
// for perturbed_limit_distribution and fallback for degenerate flux patterns.
Vec4 perturbed_stationary(const MarkovChain& chain, double eps);

// Cofactor vector c of the Press-Dyson matrix: det with last column f equals
// dot(c, f) for every f. pi_a1 fills the third column, pi_a2 the first.
Vec4 press_dyson_cofactors(const MemoryOneStrategy& pi_d,
                           const MemoryOneStrategy& pi_a1,
                           const MemoryOneStrategy& pi_a2);

// Press-Dyson determinant D(pi_d, pi_a1, pi_a2, f).
double press_dyson_det(const MemoryOneStrategy& pi_d,
                       const MemoryOneStrategy& pi_a1,
                       const MemoryOneStrategy& pi_a2, const Vec4& f);
// D(pi_d, pi_a, f) = D(pi_d, pi_a, pi_a, f).
double press_dyson_det(const MemoryOneStrategy& pi_d,
                       const MemoryOneStrategy& pi_a, const Vec4& f);

struct UtilityPair {
  double u_d = 0.0;
  double u_a = 0.0;
  Route route = Route::kDeterminant;
};

// Long-run average utilities. Determinant route D(.,.,S)/D(.,.,1) whenever
// |D(.,.,1)| > 1e-9, exact perturbed limit otherwise.
UtilityPair long_run_utilities(const StageGame& game,
                               const MemoryOneStrategy& pi_d,
                               const MemoryOneStrategy& pi_a);

// Same quantities through stationary_distribution; agreement with the
// determinant route is a standing invariant.
UtilityPair utilities_via_stationary(const StageGame& game,
                                     const MemoryOneStrategy& pi_d,
                                     const MemoryOneStrategy& pi_a);

// Closed form against a stubborn attacker: weights pi_d(1|21), pi_d(2|11) on
// the (1,1) and (2,1) payoffs. Exactly independent of the stubborn strategy's
// behavior in states 12 and 22. When pi_d(2|11) + pi_d(1|21) = 0 the chain is
// treated as absorbed in state 11 and (U11^d, U11^a) is returned with the
// route flagged kPerturbedLimit.
UtilityPair stubborn_utilities(const StageGame& game,
                               const MemoryOneStrategy& pi_d,
                               const StubbornStrategy& stubborn);

inline constexpr double kDeterminantRouteTol = 1e-9;
inline constexpr double kPerturbEps = 1e-8;

}  // namespace zdsec
