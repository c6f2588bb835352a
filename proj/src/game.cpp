#include "zdsec/game.hpp"

#include <algorithm>
#include <cmath>

namespace zdsec {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kSupportTol = 1e-14;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double StageGame::defender_min() const {
  return std::min(std::min(u_d[0][0], u_d[0][1]), std::min(u_d[1][0], u_d[1][1]));
}
double StageGame::defender_max() const {
  return std::max(std::max(u_d[0][0], u_d[0][1]), std::max(u_d[1][0], u_d[1][1]));
}
double StageGame::attacker_min() const {
  return std::min(std::min(u_a[0][0], u_a[0][1]), std::min(u_a[1][0], u_a[1][1]));
}
double StageGame::attacker_max() const {
  return std::max(std::max(u_a[0][0], u_a[0][1]), std::max(u_a[1][0], u_a[1][1]));
}

bool StageGame::finite() const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!std::isfinite(u_d[i][j]) || !std::isfinite(u_a[i][j])) return false;
  return true;
}

std::string StageGame::assumption1_violation() const {
  if (!finite()) return "payoff entries must be finite";
  const double dmin = std::min(u_d[0][0], u_d[1][1]);
  const double dmax = std::max(u_d[0][1], u_d[1][0]);
  if (!(dmin > dmax))
    return "min{U11^d, U22^d} > max{U12^d, U21^d} fails (" +
           std::to_string(dmin) + " <= " + std::to_string(dmax) + ")";
  if (!(u_a[0][0] < u_a[0][1]))
    return "U11^a < U12^a fails (" + std::to_string(u_a[0][0]) +
           " >= " + std::to_string(u_a[0][1]) + ")";
  if (!(u_a[1][1] < u_a[1][0]))
    return "U22^a < U21^a fails (" + std::to_string(u_a[1][1]) +
           " >= " + std::to_string(u_a[1][0]) + ")";
  return "";
}

void StageGame::require_assumption1() const {
  const std::string v = assumption1_violation();
  if (!v.empty()) throw PreconditionError("payoff assumption violated: " + v);
}

void MemoryOneStrategy::validate(double tol) const {
  for (int s = 0; s < 4; ++s) {
    if (!std::isfinite(p[s]) || p[s] < -tol || p[s] > 1.0 + tol)
      throw InputDomainError("strategy probability for state " +
                             std::string(kStateNames[s]) + " outside [0,1]: " +
                             std::to_string(p[s]));
  }
}

MemoryOneStrategy MemoryOneStrategy::clamped() const {
  MemoryOneStrategy r = *this;
  for (int s = 0; s < 4; ++s) r.p[s] = clamp01(r.p[s]);
  return r;
}

StubbornStrategy::StubbornStrategy(MemoryOneStrategy m) : s_(m) {
  s_.validate();
  s_ = s_.clamped();
  if (std::abs(s_.p[kS11] - 1.0) > kProbTol || std::abs(s_.p[kS21] - 1.0) > kProbTol)
    throw InputDomainError(
        "stubborn strategy must keep attacking target 1: p[11] = p[21] = 1");
  s_.p[kS11] = 1.0;
  s_.p[kS21] = 1.0;
}

MixtureAttacker::MixtureAttacker(double l, StubbornStrategy st)
    : lambda(l), stubborn(st) {
  if (!(l >= 0.0 && l <= 1.0))
    throw InputDomainError("lambda outside [0,1]: " + std::to_string(l));
}

MemoryOneStrategy mixture_strategy(const MemoryOneStrategy& br,
                                   const StubbornStrategy& stubborn,
                                   double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InputDomainError("lambda outside [0,1]: " + std::to_string(lambda));
  br.validate();
  MemoryOneStrategy r;
  for (int s = 0; s < 4; ++s)
    r.p[s] = lambda * br.p[s] + (1.0 - lambda) * stubborn[s];
  return r.clamped();
}

MarkovChain build_chain(const MemoryOneStrategy& pi_d,
                        const MemoryOneStrategy& pi_a) {
  pi_d.validate();
  pi_a.validate();
  const MemoryOneStrategy d = pi_d.clamped();
  const MemoryOneStrategy a = pi_a.clamped();
  MarkovChain c;
  for (int s = 0; s < 4; ++s) {
    c.m[s][kS11] = d.p[s] * a.p[s];
    c.m[s][kS12] = d.p[s] * (1.0 - a.p[s]);
    c.m[s][kS21] = (1.0 - d.p[s]) * a.p[s];
    c.m[s][kS22] = (1.0 - d.p[s]) * (1.0 - a.p[s]);
  }
  c.strategies = std::make_pair(d, a);
  return c;
}

const char* route_name(Route r) {
  switch (r) {
    case Route::kStationary: return "stationary";
    case Route::kDeterminant: return "determinant";
    case Route::kStubbornClosedForm: return "stubborn-closed-form";
    case Route::kPerturbedLimit: return "perturbed-limit";
  }
  return "?";
}

namespace {

// Solve v M = v, sum(v) = 1 by replacing the last equation of (M^T - I)v = 0
// with the normalization row. Returns false when the system is singular or the
// solution fails the stationarity checks (several recurrent classes).
bool stationary_by_solve(const Mat4& m, Vec4& out) {
  double a[4][4];
  double b[4] = {0.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m[j][i] - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < 4; ++j) a[3][j] = 1.0;
  double x[4];
  if (!solve_dense(4, a, b, x, 1e-11)) return false;
  Vec4 v{x[0], x[1], x[2], x[3]};
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(v[i]) || v[i] < -1e-9) return false;
    v[i] = std::max(0.0, v[i]);
  }
  const double s = sum(v);
  if (!(s > 0.5 && s < 2.0)) return false;
  v = scale(v, 1.0 / s);
  if (linf_diff(row_times(v, m), v) > 1e-10) return false;
  out = v;
  return true;
}

struct ClassDecomposition {
  // cls[s]: recurrent class id of state s, or -1 for transient states.
  std::array<int, 4> cls{};
  int n_classes = 0;
  // Per class: stationary distribution supported on the class.
  std::array<Vec4, 4> nu{};
  // absorb[t][c]: probability a walk from transient state t ends in class c.
  std::array<std::array<double, 4>, 4> absorb{};
};

// Stationary distribution restricted to one recurrent class.
bool class_stationary(const Mat4& m, const std::array<int, 4>& cls, int c,
                      Vec4& out) {
  int idx[4];
  int n = 0;
  for (int s = 0; s < 4; ++s)
    if (cls[s] == c) idx[n++] = s;
  out = {0, 0, 0, 0};
  if (n == 1) {
    out[idx[0]] = 1.0;
    return true;
  }
  double a[4][4];
  double b[4] = {0, 0, 0, 0};
  b[n - 1] = 1.0;
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n; ++j)
      a[i][j] = m[idx[j]][idx[i]] - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  double x[4];
  if (!solve_dense(n, a, b, x, 1e-12)) return false;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || x[i] < -1e-9) return false;
    x[i] = std::max(0.0, x[i]);
    s += x[i];
  }
  for (int i = 0; i < n; ++i) out[idx[i]] = x[i] / s;
  return true;
}

bool decompose(const Mat4& m, ClassDecomposition& d) {
  bool reach[4][4] = {};
  for (int i = 0; i < 4; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < 4; ++j)
      if (m[i][j] > kSupportTol) reach[i][j] = true;
  }
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;

  d.cls = {-1, -1, -1, -1};
  d.n_classes = 0;
  int scc[4] = {-1, -1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    if (scc[i] >= 0) continue;
    // Closed SCC test: everything reachable from i must reach back.
    bool closed = true;
    for (int j = 0; j < 4; ++j)
      if (reach[i][j] && !reach[j][i]) closed = false;
    if (!closed) continue;
    const int id = d.n_classes++;
    for (int j = 0; j < 4; ++j)
      if (reach[i][j] && reach[j][i]) {
        scc[j] = id;
        d.cls[j] = id;
      }
  }
  for (int c = 0; c < d.n_classes; ++c)
    if (!class_stationary(m, d.cls, c, d.nu[c])) return false;

  // Absorption probabilities from transient states, one class at a time.
  int tr[4];
  int nt = 0;
  for (int s = 0; s < 4; ++s)
    if (d.cls[s] < 0) tr[nt++] = s;
  for (int c = 0; c < d.n_classes; ++c) {
    if (nt == 0) break;
    double a[4][4];
    double b[4];
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j)
        a[i][j] = (i == j ? 1.0 : 0.0) - m[tr[i]][tr[j]];
      double r = 0.0;
      for (int s = 0; s < 4; ++s)
        if (d.cls[s] == c) r += m[tr[i]][s];
      b[i] = r;
    }
    double x[4];
    if (!solve_dense(nt, a, b, x, 1e-12)) return false;
    for (int i = 0; i < nt; ++i) d.absorb[tr[i]][c] = clamp01(x[i]);
  }
  return true;
}

// d/d(eps) at eps = 0 of the eps-uniform-mixed transition matrix. Strategy
// mixing when the pair is known, row mixing toward the uniform chain
// otherwise.
Mat4 mixing_derivative(const MarkovChain& chain) {
  Mat4 g{};
  if (chain.strategies) {
    const auto& [pd, pa] = *chain.strategies;
    for (int s = 0; s < 4; ++s) {
      for (int dact = 1; dact <= 2; ++dact) {
        const double fd = dact == 1 ? pd.p[s] : 1.0 - pd.p[s];
        for (int aact = 1; aact <= 2; ++aact) {
          const double fa = aact == 1 ? pa.p[s] : 1.0 - pa.p[s];
          g[s][state_of(dact, aact)] =
              (0.5 - fd) * fa + fd * (0.5 - fa);
        }
      }
    }
  } else {
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t) g[s][t] = 0.25 - chain.m[s][t];
  }
  return g;
}

Mat4 mixed_chain(const MarkovChain& chain, double eps) {
  Mat4 m{};
  if (chain.strategies) {
    const auto& [pd, pa] = *chain.strategies;
    MemoryOneStrategy d = pd, a = pa;
    for (int s = 0; s < 4; ++s) {
      d.p[s] = (1.0 - eps) * d.p[s] + eps * 0.5;
      a.p[s] = (1.0 - eps) * a.p[s] + eps * 0.5;
    }
    for (int s = 0; s < 4; ++s) {
      m[s][kS11] = d.p[s] * a.p[s];
      m[s][kS12] = d.p[s] * (1.0 - a.p[s]);
      m[s][kS21] = (1.0 - d.p[s]) * a.p[s];
      m[s][kS22] = (1.0 - d.p[s]) * (1.0 - a.p[s]);
    }
  } else {
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t)
        m[s][t] = (1.0 - eps) * chain.m[s][t] + eps * 0.25;
  }
  return m;
}

}  // namespace

Vec4 perturbed_stationary(const MarkovChain& chain, double eps) {
  Vec4 v;
  if (stationary_by_solve(mixed_chain(chain, eps), v)) return v;
  // Power iteration backstop; the mixed chain is strictly positive so this
  // always converges.
  v = {0.25, 0.25, 0.25, 0.25};
  const Mat4 m = mixed_chain(chain, eps);
  for (int it = 0; it < 200000; ++it) {
    Vec4 n = row_times(v, m);
    n = scale(n, 1.0 / sum(n));
    if (linf_diff(n, v) < 1e-15) return n;
    v = n;
  }
  return v;
}

Vec4 perturbed_limit_distribution(const MarkovChain& chain) {
  ClassDecomposition dec;
  if (!decompose(chain.m, dec) || dec.n_classes == 0)
    return perturbed_stationary(chain, kPerturbEps);
  if (dec.n_classes == 1) {
    // Unique recurrent class: the limit is its stationary distribution.
    return dec.nu[0];
  }
  const Mat4 g = mixing_derivative(chain);
  const int k = dec.n_classes;
  // First-order exchange fluxes between classes, leaks through transient
  // states credited by absorption probability.
  double flux[4][4] = {};
  for (int c = 0; c < k; ++c) {
    for (int s = 0; s < 4; ++s) {
      if (dec.cls[s] != c) continue;
      for (int t = 0; t < 4; ++t) {
        if (dec.cls[t] == c) continue;
        const double rate = dec.nu[c][s] * std::max(0.0, g[s][t]);
        if (rate <= 0.0) continue;
        if (dec.cls[t] >= 0) {
          flux[c][dec.cls[t]] += rate;
        } else {
          for (int c2 = 0; c2 < k; ++c2)
            if (c2 != c) flux[c][c2] += rate * dec.absorb[t][c2];
          // Mass absorbed back into c cancels and carries no net flux.
        }
      }
    }
  }
  // Stationary weights of the slow exchange process: w G = 0, sum w = 1,
  // where G is the generator with rows flux[c][.] and diagonal -rowsum.
  double a[4][4];
  double b[4] = {0, 0, 0, 0};
  for (int i = 0; i < k - 1; ++i) {
    for (int j = 0; j < k; ++j) {
      a[i][j] = flux[j][i];
      if (i == j) {
        double out = 0.0;
        for (int c2 = 0; c2 < k; ++c2)
          if (c2 != j) out += flux[j][c2];
        a[i][j] = -out;
      }
    }
  }
  b[k - 1] = 1.0;
  for (int j = 0; j < k; ++j) a[k - 1][j] = 1.0;
  double w[4];
  if (!solve_dense(k, a, b, w, 1e-300)) return perturbed_stationary(chain, kPerturbEps);
  double ws = 0.0;
  for (int c = 0; c < k; ++c) {
    if (!std::isfinite(w[c]) || w[c] < -1e-9)
      return perturbed_stationary(chain, kPerturbEps);
    w[c] = std::max(0.0, w[c]);
    ws += w[c];
  }
  if (!(ws > 0.0)) return perturbed_stationary(chain, kPerturbEps);
  Vec4 v{0, 0, 0, 0};
  for (int c = 0; c < k; ++c) v = add(v, scale(dec.nu[c], w[c] / ws));
  return v;
}

StationaryResult stationary_distribution(const MarkovChain& chain) {
  for (int s = 0; s < 4; ++s) {
    double rs = 0.0;
    for (int t = 0; t < 4; ++t) {
      if (chain.m[s][t] < -kProbTol || chain.m[s][t] > 1.0 + kProbTol)
        throw InputDomainError("chain entry outside [0,1]");
      rs += chain.m[s][t];
    }
    if (std::abs(rs - 1.0) > 1e-12)
      throw InputDomainError("chain row " + std::string(kStateNames[s]) +
                             " does not sum to 1");
  }
  Vec4 v;
  if (stationary_by_solve(chain.m, v)) return {v, Route::kStationary};
  return {perturbed_limit_distribution(chain), Route::kPerturbedLimit};
}

Vec4 press_dyson_cofactors(const MemoryOneStrategy& pi_d,
                           const MemoryOneStrategy& pi_a1,
                           const MemoryOneStrategy& pi_a2) {
  // Columns of the Press-Dyson matrix except the free last column f:
  //   g_s = pi_d(1|s) pi_a2(1|s) - [s = 11]
  //   h_s = pi_d(1|s) - [s in {11, 12}]
  //   q_s = pi_a1(1|s) - [s in {11, 21}]
  // det(g h q f) = sum_s f_s c_s with c_s the signed 3x3 minors below.
  Vec4 g, h, q;
  for (int s = 0; s < 4; ++s) {
    g[s] = pi_d.p[s] * pi_a2.p[s] - (s == kS11 ? 1.0 : 0.0);
    h[s] = pi_d.p[s] - (s <= kS12 ? 1.0 : 0.0);
    q[s] = pi_a1.p[s] - (s == kS11 || s == kS21 ? 1.0 : 0.0);
  }
  Vec4 c;
  c[0] = -det3(g[1], h[1], q[1], g[2], h[2], q[2], g[3], h[3], q[3]);
  c[1] = det3(g[0], h[0], q[0], g[2], h[2], q[2], g[3], h[3], q[3]);
  c[2] = -det3(g[0], h[0], q[0], g[1], h[1], q[1], g[3], h[3], q[3]);
  c[3] = det3(g[0], h[0], q[0], g[1], h[1], q[1], g[2], h[2], q[2]);
  return c;
}

double press_dyson_det(const MemoryOneStrategy& pi_d,
                       const MemoryOneStrategy& pi_a1,
                       const MemoryOneStrategy& pi_a2, const Vec4& f) {
  return dot(press_dyson_cofactors(pi_d, pi_a1, pi_a2), f);
}

double press_dyson_det(const MemoryOneStrategy& pi_d,
                       const MemoryOneStrategy& pi_a, const Vec4& f) {
  return press_dyson_det(pi_d, pi_a, pi_a, f);
}

UtilityPair long_run_utilities(const StageGame& game,
                               const MemoryOneStrategy& pi_d,
                               const MemoryOneStrategy& pi_a) {
  pi_d.validate();
  pi_a.validate();
  const Vec4 c = press_dyson_cofactors(pi_d, pi_a, pi_a);
  const double d1 = sum(c);
  if (std::abs(d1) > kDeterminantRouteTol) {
    return {dot(c, game.defender_payoffs()) / d1,
            dot(c, game.attacker_payoffs()) / d1, Route::kDeterminant};
  }
  const Vec4 v = perturbed_limit_distribution(build_chain(pi_d, pi_a));
  return {dot(v, game.defender_payoffs()), dot(v, game.attacker_payoffs()),
          Route::kPerturbedLimit};
}

UtilityPair utilities_via_stationary(const StageGame& game,
                                     const MemoryOneStrategy& pi_d,
                                     const MemoryOneStrategy& pi_a) {
  const StationaryResult st = stationary_distribution(build_chain(pi_d, pi_a));
  return {dot(st.v, game.defender_payoffs()),
          dot(st.v, game.attacker_payoffs()), st.route};
}

UtilityPair stubborn_utilities(const StageGame& game,
                               const MemoryOneStrategy& pi_d,
                               const StubbornStrategy& stubborn) {
  (void)stubborn;  // the closed form depends only on p[11] = p[21] = 1
  pi_d.validate();
  const double to21 = 1.0 - pi_d.p[kS11];  // pi_d(2|11)
  const double to11 = pi_d.p[kS21];        // pi_d(1|21)
  const double den = to21 + to11;
  if (den <= 0.0) {
    return {game.u_d[0][0], game.u_a[0][0], Route::kPerturbedLimit};
  }
  const double w11 = to11 / den;
  return {game.u_d[0][0] * w11 + game.u_d[1][0] * (1.0 - w11),
          game.u_a[0][0] * w11 + game.u_a[1][0] * (1.0 - w11),
          Route::kStubbornClosedForm};
}

}  // namespace zdsec
