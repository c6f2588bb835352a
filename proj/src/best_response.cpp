#include "zdsec/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace zdsec {

DeterministicAttackerPolicy DeterministicAttackerPolicy::from_index(int idx) {
  DeterministicAttackerPolicy p;
  for (int s = 0; s < 4; ++s) p.a[s] = ((idx >> s) & 1) ? 2 : 1;
  return p;
}

int DeterministicAttackerPolicy::index() const {
  int idx = 0;
  for (int s = 0; s < 4; ++s)
    if (a[s] == 2) idx |= 1 << s;
  return idx;
}

MemoryOneStrategy DeterministicAttackerPolicy::to_strategy() const {
  MemoryOneStrategy m;
  for (int s = 0; s < 4; ++s) m.p[s] = a[s] == 1 ? 1.0 : 0.0;
  return m;
}

BestResponseResult best_response(const StageGame& game,
                                 const MemoryOneStrategy& pi_d) {
  pi_d.validate();
  double av[16], dv[16];
  double best_av = -std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < 16; ++idx) {
    const auto pa = DeterministicAttackerPolicy::from_index(idx);
    const UtilityPair u = long_run_utilities(game, pi_d, pa.to_strategy());
    av[idx] = u.u_a;
    dv[idx] = u.u_d;
    best_av = std::max(best_av, av[idx]);
  }
  BestResponseResult r;
  r.attacker_value = best_av;
  int pick = -1;
  for (int idx = 0; idx < 16; ++idx) {
    if (av[idx] < best_av - kTieTol) continue;
    r.tied_set.push_back(DeterministicAttackerPolicy::from_index(idx));
    if (pick < 0 || dv[idx] > dv[pick]) pick = idx;
  }
  r.policy = DeterministicAttackerPolicy::from_index(pick).to_strategy();
  r.defender_value = dv[pick];
  return r;
}

namespace {

std::vector<double> grid_axis(double step) {
  std::vector<double> axis;
  const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int i = 0; i <= n; ++i) axis.push_back(std::min(1.0, i * step));
  if (axis.back() < 1.0) axis.push_back(1.0);
  return axis;
}

double clip_sse(double x) {
  return std::min(1.0 - kSseClip, std::max(kSseClip, x));
}

// Total order on candidates: higher value wins, ties go to the
// lexicographically smaller strategy. Associative merge for parallel scans.
struct Candidate {
  double value = -std::numeric_limits<double>::infinity();
  MemoryOneStrategy strat{};

  bool beats(const Candidate& o) const {
    if (value != o.value) return value > o.value;
    return strat.p < o.strat.p;
  }
};

// The defender-value landscape is multimodal (the attacker's argmax policy
// switches discontinuously), so refinement descends from the best
// kRefineSeeds coarse points, not just the single best.
constexpr int kRefineSeeds = 32;

struct TopList {
  std::vector<Candidate> items;  // sorted, best first, size <= kRefineSeeds

  void offer(const Candidate& c) {
    auto pos = items.begin();
    while (pos != items.end() && pos->beats(c)) ++pos;
    if (pos == items.end() && items.size() >= kRefineSeeds) return;
    items.insert(pos, c);
    if (items.size() > kRefineSeeds) items.pop_back();
  }

  void merge(const TopList& other) {
    for (const Candidate& c : other.items) offer(c);
  }
};

}  // namespace

double best_response_certificate(const StageGame& game,
                                 const MemoryOneStrategy& pi_d,
                                 double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw InputDomainError("grid_step must lie in (0, 0.5]");
  const BestResponseResult br = best_response(game, pi_d);
  const std::vector<double> axis = grid_axis(grid_step);
  double worst = -std::numeric_limits<double>::infinity();
  MemoryOneStrategy pa;
  for (double a0 : axis) {
    pa.p[0] = a0;
    for (double a1 : axis) {
      pa.p[1] = a1;
      for (double a2 : axis) {
        pa.p[2] = a2;
        for (double a3 : axis) {
          pa.p[3] = a3;
          const UtilityPair u = long_run_utilities(game, pi_d, pa);
          worst = std::max(worst, u.u_a - br.attacker_value);
        }
      }
    }
  }
  return worst;
}

SSEResult solve_sse(const StageGame& game, double coarse_step,
                    int refine_rounds, int threads) {
  game.require_assumption1();
  if (!(coarse_step > 0.0 && coarse_step <= 0.5))
    throw InputDomainError("coarse_step must lie in (0, 0.5]");
  if (refine_rounds < 0) throw InputDomainError("refine_rounds must be >= 0");
  if (threads <= 0)
    threads = std::max(1u, std::thread::hardware_concurrency());

  std::uint64_t evals = 0;

  const auto value_of = [&](const MemoryOneStrategy& pd) {
    return best_response(game, pd).defender_value;
  };

  std::vector<double> axis = grid_axis(coarse_step);
  for (double& x : axis) x = clip_sse(x);
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  const std::size_t n = axis.size();
  const std::size_t total = n * n * n * n;

  const auto eval_range = [&](std::size_t lo, std::size_t hi) {
    TopList best;
    MemoryOneStrategy pd;
    for (std::size_t t = lo; t < hi; ++t) {
      std::size_t r = t;
      pd.p[3] = axis[r % n];
      r /= n;
      pd.p[2] = axis[r % n];
      r /= n;
      pd.p[1] = axis[r % n];
      r /= n;
      pd.p[0] = axis[r];
      best.offer({value_of(pd), pd});
    }
    return best;
  };

  TopList seeds;
  if (threads == 1 || total < 4096) {
    seeds = eval_range(0, total);
  } else {
    std::vector<TopList> parts(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const std::size_t lo = std::min(total, w * chunk);
      const std::size_t hi = std::min(total, lo + chunk);
      pool.emplace_back([&, w, lo, hi] { parts[w] = eval_range(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : parts) seeds.merge(p);
  }
  evals += total;

  Candidate incumbent;
  double final_step = coarse_step;
  for (const Candidate& seed : seeds.items) {
    Candidate cur = seed;
    double step = coarse_step;
    for (int round = 0; round < refine_rounds; ++round) {
      step *= 0.5;
      // Local grid around the incumbent spanning two halved steps per side;
      // the span overlaps the previous resolution so ridges stay trackable.
      Candidate best = cur;
      MemoryOneStrategy pd;
      for (int i0 = -2; i0 <= 2; ++i0)
        for (int i1 = -2; i1 <= 2; ++i1)
          for (int i2 = -2; i2 <= 2; ++i2)
            for (int i3 = -2; i3 <= 2; ++i3) {
              if (!i0 && !i1 && !i2 && !i3) continue;
              pd.p[0] = clip_sse(cur.strat.p[0] + i0 * step);
              pd.p[1] = clip_sse(cur.strat.p[1] + i1 * step);
              pd.p[2] = clip_sse(cur.strat.p[2] + i2 * step);
              pd.p[3] = clip_sse(cur.strat.p[3] + i3 * step);
              const Candidate c{value_of(pd), pd};
              ++evals;
              if (c.beats(best)) best = c;
            }
      cur = best;
    }
    final_step = step;
    if (cur.beats(incumbent)) incumbent = cur;
  }

  const BestResponseResult br = best_response(game, incumbent.strat);
  SSEResult out;
  out.pi_d_sse = incumbent.strat;
  out.pi_a_sse = br.policy;
  out.u_d_sse = br.defender_value;
  out.u_a_sse = br.attacker_value;
  out.trace = {coarse_step, refine_rounds, final_step, evals};
  return out;
}

double sse_value_case2(const StageGame& game) {
  game.require_assumption1();
  const Vec4 sd = game.defender_payoffs();
  const Vec4 sa = game.attacker_payoffs();
  if (!(sd[kS11] < sd[kS22]))
    throw CaseMismatchError("closed form needs U11^d < U22^d");
  if (!(sa[kS11] >= sa[kS21]))
    throw CaseMismatchError("closed form needs U11^a >= U21^a");
  return sd[kS11] +
         (sa[kS21] - sa[kS11]) * (sd[kS22] - sd[kS11]) / (sa[kS22] - sa[kS11]);
}

}  // namespace zdsec
