#include "zdsec/zd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zdsec/rng.hpp"

namespace zdsec {

namespace {

Vec4 relation_values(const StageGame& game, double eta, double beta,
                     double gamma) {
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();
  Vec4 r;
  for (int s = 0; s < 4; ++s) r[s] = eta * sd[s] + beta * sa[s] + gamma;
  return r;
}

double cross(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

// Signed side of payoff point s relative to the line through the (1,1) and
// (1,2) payoff points.
double side_of_1112(const StageGame& g, int s) {
  const Vec4 sd = g.defender_payoffs();
  const Vec4 sa = g.attacker_payoffs();
  const double ex = sd[kS12] - sd[kS11];
  const double ey = sa[kS12] - sa[kS11];
  return cross(ex, ey, sd[s] - sd[kS11], sa[s] - sa[kS11]);
}

}  // namespace

const char* branch_name(FeasibleBranch b) {
  switch (b) {
    case FeasibleBranch::kNone: return "none";
    case FeasibleBranch::kLowFirst: return "low-first";
    case FeasibleBranch::kHighFirst: return "high-first";
    case FeasibleBranch::kBoth: return "both";
  }
  return "?";
}

FeasibleBranch relation_feasible_unchecked(const StageGame& game, double eta,
                                           double beta, double gamma) {
  if (eta == 0.0 && beta == 0.0 && gamma == 0.0)
    throw InputDomainError("(eta, beta, gamma) = (0, 0, 0) is not a relation");
  if (!std::isfinite(eta) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw InputDomainError("relation coefficients must be finite");
  const Vec4 r = relation_values(game, eta, beta, gamma);
  const double t = kFeasibilityTol;
  const bool low = r[kS11] <= t && r[kS12] <= t && r[kS21] >= -t && r[kS22] >= -t;
  const bool high = r[kS11] >= -t && r[kS12] >= -t && r[kS21] <= t && r[kS22] <= t;
  if (low && high) return FeasibleBranch::kBoth;
  if (low) return FeasibleBranch::kLowFirst;
  if (high) return FeasibleBranch::kHighFirst;
  return FeasibleBranch::kNone;
}

FeasibleBranch relation_feasible(const StageGame& game, double eta,
                                 double beta, double gamma) {
  game.require_assumption1();
  return relation_feasible_unchecked(game, eta, beta, gamma);
}

bool zd_exists(const StageGame& game) {
  game.require_assumption1();
  const double c21 = side_of_1112(game, kS21);
  const double c22 = side_of_1112(game, kS22);
  const double t = kFeasibilityTol;
  return (c21 >= -t && c22 >= -t) || (c21 <= t && c22 <= t);
}

std::string zd_exists_diagnostic(const StageGame& game) {
  const double c21 = side_of_1112(game, kS21);
  const double c22 = side_of_1112(game, kS22);
  if ((c21 >= -kFeasibilityTol && c22 >= -kFeasibilityTol) ||
      (c21 <= kFeasibilityTol && c22 <= kFeasibilityTol))
    return "";
  return std::string("payoff points (U21, U21^a) and (U22, U22^a) straddle "
                     "the line through (U11, U11^a) and (U12, U12^a): "
                     "side(21) = ") +
         std::to_string(c21) + ", side(22) = " + std::to_string(c22);
}

ZDConstruction construct_zd_unchecked(const StageGame& game, double eta,
                                      double beta, double gamma) {
  const FeasibleBranch branch = relation_feasible_unchecked(game, eta, beta, gamma);
  if (branch == FeasibleBranch::kNone)
    throw FeasibilityError(
        "no defender strategy enforces the relation eta*U_d + beta*U_a + "
        "gamma = 0 for (eta, beta, gamma) = (" +
        std::to_string(eta) + ", " + std::to_string(beta) + ", " +
        std::to_string(gamma) + ")");
  const Vec4 r = relation_values(game, eta, beta, gamma);
  double m = 0.0;
  for (int s = 0; s < 4; ++s) m = std::max(m, std::abs(r[s]));

  ZDConstruction out;
  out.branch = branch;
  out.params = {eta, beta, gamma, 0.0};
  if (m <= kFeasibilityTol) {
    // All four payoff points on the line: the relation already holds for any
    // utility pair, and the base strategy realizes it.
    out.strategy = strategy(1.0, 1.0, 0.0, 0.0);
    return out;
  }
  const double phi = (branch == FeasibleBranch::kHighFirst ? -1.0 : 1.0) / m;
  out.params.phi = phi;
  MemoryOneStrategy p;
  const Vec4 pihat{1.0, 1.0, 0.0, 0.0};
  for (int s = 0; s < 4; ++s) p.p[s] = phi * r[s] + pihat[s];
  out.strategy = p.clamped();
  out.strategy.validate();
  return out;
}

ZDConstruction construct_zd(const StageGame& game, double eta, double beta,
                            double gamma) {
  game.require_assumption1();
  return construct_zd_unchecked(game, eta, beta, gamma);
}

namespace {

// Admissible slope interval for the line with anchor payoff point `anchor`:
// all k such that r_s(k) = (U_s^a - U_anchor^a) - k (U_s^d - U_anchor^d) has
// the sign pattern of one feasibility branch. Each constraint is linear in k.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool empty() const { return !(lo <= hi); }
};

Interval intersect(Interval a, Interval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// Constraint sign * r_s(k) <= 0 with r_s(k) = da_s - k * dd_s.
Interval slope_constraint(double dd, double da, int sign) {
  // sign * (da - k dd) <= 0  <=>  k dd sign >= da sign.
  const double lhs = sign * dd;
  const double rhs = sign * da;
  Interval iv;
  if (std::abs(lhs) <= kFeasibilityTol) {
    if (rhs > kFeasibilityTol) iv.lo = 1.0, iv.hi = 0.0;  // infeasible
    return iv;
  }
  if (lhs > 0) iv.lo = rhs / lhs;
  else iv.hi = rhs / lhs;
  return iv;
}

Interval admissible_slopes(const StageGame& game, int anchor, bool high_first) {
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();
  Interval iv;
  for (int s = 0; s < 4; ++s) {
    if (s == anchor) continue;
    // high_first: r >= 0 on {11,12}, r <= 0 on {21,22}.
    const int want_nonpos = (s >= kS21) == high_first ? 1 : -1;
    iv = intersect(iv, slope_constraint(sd[s] - sd[anchor], sa[s] - sa[anchor],
                                        want_nonpos));
    if (iv.empty()) break;
  }
  return iv;
}

ZDConstruction anchored(const StageGame& game, int anchor, double k) {
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();
  return construct_zd(game, -k, 1.0, k * sd[anchor] - sa[anchor]);
}

std::string fmt(double x) { return std::to_string(x); }

}  // namespace

const char* named_construction_name(NamedConstruction c) {
  switch (c) {
    case NamedConstruction::kAnchor11: return "anchor11";
    case NamedConstruction::kEqualizer21: return "equalizer21";
    case NamedConstruction::kAnchor12: return "anchor12";
    case NamedConstruction::kLine1112: return "line1112";
  }
  return "?";
}

std::optional<NamedConstruction> named_construction_from(const std::string& s) {
  if (s == "anchor11") return NamedConstruction::kAnchor11;
  if (s == "equalizer21") return NamedConstruction::kEqualizer21;
  if (s == "anchor12") return NamedConstruction::kAnchor12;
  if (s == "line1112") return NamedConstruction::kLine1112;
  return std::nullopt;
}

ZDConstruction named_zd(const StageGame& game, NamedConstruction which,
                        std::optional<double> k_opt) {
  game.require_assumption1();
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();

  switch (which) {
    case NamedConstruction::kAnchor11: {
      if (!(sd[kS11] >= sd[kS22]))
        throw CaseMismatchError("anchor11 needs U11^d >= U22^d; " +
                                fmt(sd[kS11]) + " < " + fmt(sd[kS22]));
      if (!(sa[kS11] >= sa[kS21]))
        throw CaseMismatchError("anchor11 needs U11^a >= U21^a; " +
                                fmt(sa[kS11]) + " < " + fmt(sa[kS21]));
      const double hi = (sa[kS11] - sa[kS21]) / (sd[kS11] - sd[kS21]);
      Interval iv = intersect({0.0, hi},
                              admissible_slopes(game, kS11, /*high_first=*/true));
      if (iv.empty())
        throw CaseMismatchError("anchor11 slope interval is empty");
      double k = k_opt.value_or(0.5 * (iv.lo + iv.hi));
      if (k < iv.lo - kFeasibilityTol || k > iv.hi + kFeasibilityTol)
        throw InputDomainError("anchor11 slope " + fmt(k) +
                               " outside admissible [" + fmt(iv.lo) + ", " +
                               fmt(iv.hi) + "]");
      return anchored(game, kS11, k);
    }
    case NamedConstruction::kEqualizer21: {
      if (!(sa[kS11] >= sa[kS21]))
        throw CaseMismatchError("equalizer21 needs U11^a >= U21^a; " +
                                fmt(sa[kS11]) + " < " + fmt(sa[kS21]));
      return construct_zd(game, 0.0, 1.0, -sa[kS21]);
    }
    case NamedConstruction::kAnchor12: {
      const double lo = (sa[kS22] - sa[kS12]) / (sd[kS22] - sd[kS12]);
      const double hi = (sa[kS11] - sa[kS12]) / (sd[kS11] - sd[kS12]);
      Interval stated{std::min(lo, hi), std::max(lo, hi)};
      Interval iv = intersect(stated,
                              admissible_slopes(game, kS12, /*high_first=*/true));
      if (iv.empty())
        iv = intersect(stated,
                       admissible_slopes(game, kS12, /*high_first=*/false));
      if (iv.empty())
        throw CaseMismatchError(
            "anchor12 slope interval [" + fmt(stated.lo) + ", " +
            fmt(stated.hi) + "] has no feasible point");
      double k = k_opt.value_or(0.5 * (iv.lo + iv.hi));
      if (k < iv.lo - kFeasibilityTol || k > iv.hi + kFeasibilityTol)
        throw InputDomainError("anchor12 slope " + fmt(k) +
                               " outside admissible [" + fmt(iv.lo) + ", " +
                               fmt(iv.hi) + "]");
      return anchored(game, kS12, k);
    }
    case NamedConstruction::kLine1112: {
      const double k = (sa[kS11] - sa[kS12]) / (sd[kS11] - sd[kS12]);
      if (k_opt && *k_opt != k)
        throw InputDomainError("line1112 has no free slope");
      return anchored(game, kS12, k);
    }
  }
  throw InputDomainError("unknown construction");
}

ZDConstruction zd_for_rational_mix(const StageGame& game) {
  game.require_assumption1();
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();
  if (sd[kS11] >= sd[kS22] && sa[kS11] >= sa[kS21])
    return named_zd(game, NamedConstruction::kAnchor11);
  return named_zd(game, NamedConstruction::kLine1112);
}

ZDConstruction zd_for_stubborn_mix(const StageGame& game) {
  return named_zd(game, NamedConstruction::kLine1112);
}

ZDConstruction zd_for_full_rational(const StageGame& game) {
  game.require_assumption1();
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();
  if (sa[kS11] >= sa[kS21]) {
    if (sd[kS11] >= sd[kS22])
      return named_zd(game, NamedConstruction::kAnchor11);
    return named_zd(game, NamedConstruction::kEqualizer21);
  }
  return named_zd(game, NamedConstruction::kAnchor12);
}

double verify_enforcement(const StageGame& game, const MemoryOneStrategy& zd,
                          const ZDParameters& params, int n_samples,
                          std::uint64_t seed) {
  if (n_samples < 1) throw InputDomainError("n_samples must be >= 1");
  if (params.eta == 0.0 && params.beta == 0.0 && params.gamma == 0.0)
    throw InputDomainError("(0,0,0) is not a relation");
  zd.validate();

  const auto residual = [&](const MemoryOneStrategy& pa) {
    const UtilityPair u = long_run_utilities(game, zd, pa);
    return std::abs(params.eta * u.u_d + params.beta * u.u_a + params.gamma);
  };

  double worst = 0.0;
  for (int idx = 0; idx < 16; ++idx) {
    MemoryOneStrategy pa;
    for (int s = 0; s < 4; ++s) pa.p[s] = (idx >> s) & 1 ? 0.0 : 1.0;
    worst = std::max(worst, residual(pa));
  }
  CounterRng rng(seed, "zd-enforcement");
  for (int i = 0; i < n_samples; ++i) {
    MemoryOneStrategy pa;
    for (int s = 0; s < 4; ++s) pa.p[s] = rng.next_double();
    worst = std::max(worst, residual(pa));
  }
  return worst;
}

}  // namespace zdsec
