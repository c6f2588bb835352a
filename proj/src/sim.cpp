#include "zdsec/sim.hpp"

#include <cmath>
#include <cstdio>

#include "zdsec/best_response.hpp"
#include "zdsec/rng.hpp"

namespace zdsec {

const char* learner_name(Learner l) {
  return l == Learner::kFictitiousPlay ? "fictitious-play" : "q-learning";
}

void SimulationConfig::validate() const {
  if (horizon < 1) throw InputDomainError("horizon must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InputDomainError("lambda outside [0,1]");
  if (!(eps1 > 0.0 && eps1 <= 1.0))
    throw InputDomainError("eps1 outside (0,1]");
  if (!(eps2 > 0.0 && eps2 <= 1.0))
    throw InputDomainError("eps2 outside (0,1]");
}

namespace {

struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

bool keep_record(long t, long horizon) {
  return t <= 1000 || t % 100 == 0 || t == horizon;
}

int sample_action(CounterRng& rng, double p_action1) {
  return rng.next_double() < p_action1 ? 1 : 2;
}

}  // namespace

Trajectory run_fictitious_play(const StageGame& game,
                               const MemoryOneStrategy& pi_d,
                               const SimulationConfig& config) {
  if (config.learner != Learner::kFictitiousPlay)
    throw InputDomainError("config.learner must be fictitious-play");
  config.validate();
  pi_d.validate();

  const std::string pre = config.stream_prefix;
  CounterRng init_rng(config.seed, pre + "fp:init");
  CounterRng def_rng(config.seed, pre + "fp:defender");
  CounterRng att_rng(config.seed, pre + "fp:attacker");

  Trajectory traj;
  traj.horizon = config.horizon;
  traj.rng_id = CounterRng::kGeneratorId;
  traj.records.reserve(
      static_cast<std::size_t>(std::min<long>(config.horizon, 1000) +
                               config.horizon / 100 + 2));

  MemoryOneStrategy pi_hat = strategy(0.5, 0.5, 0.5, 0.5);
  std::array<long, 4> visits{};  // per-state observation counts
  int s = init_rng.below(4);
  const double lam = config.lambda;

  MemoryOneStrategy pi_a_cur =
      lam > 0.0
          ? mixture_strategy(best_response(game, pi_hat).policy,
                             config.stubborn, lam)
          : config.stubborn.strategy();

  KahanSum rd_sum, ra_sum;
  for (long t = 1; t <= config.horizon; ++t) {
    const int d = sample_action(def_rng, pi_d.p[s]);
    const int a = sample_action(att_rng, pi_a_cur.p[s]);
    const double rd = game.ud(d, a);
    const double ra = game.ua(d, a);
    rd_sum.add(rd);
    ra_sum.add(ra);
    const double ud_avg = rd_sum.s / static_cast<double>(t);
    const double ua_avg = ra_sum.s / static_cast<double>(t);

    // Empirical frequency row of the visited state: running average over its
    // own observation count. The first observation overwrites the uniform
    // prior; rows always sum to one.
    const double n = static_cast<double>(++visits[s]);
    pi_hat.p[s] = ((n - 1.0) * pi_hat.p[s] + (d == 1 ? 1.0 : 0.0)) / n;

    if (lam > 0.0)
      pi_a_cur = mixture_strategy(best_response(game, pi_hat).policy,
                                  config.stubborn, lam);

    if (keep_record(t, config.horizon))
      traj.records.push_back({t, s, d, a, rd, ra, ud_avg, ua_avg});
    s = state_of(d, a);
    traj.u_d_final = ud_avg;
    traj.u_a_final = ua_avg;
  }
  traj.pi_d_hat = pi_hat;
  return traj;
}

Trajectory run_q_learning(const StageGame& game, const MemoryOneStrategy& pi_d,
                          const SimulationConfig& config) {
  if (config.learner != Learner::kQLearning)
    throw InputDomainError("config.learner must be q-learning");
  config.validate();
  pi_d.validate();

  const std::string pre = config.stream_prefix;
  CounterRng init_rng(config.seed, pre + "q:init");
  CounterRng def_rng(config.seed, pre + "q:defender");
  CounterRng att_rng(config.seed, pre + "q:attacker");

  Trajectory traj;
  traj.horizon = config.horizon;
  traj.rng_id = CounterRng::kGeneratorId;
  traj.records.reserve(
      static_cast<std::size_t>(std::min<long>(config.horizon, 1000) +
                               config.horizon / 100 + 2));

  std::array<std::array<double, 2>, 4> q{};
  double r_bar = 0.0;
  int s = init_rng.below(4);
  const double lam = config.lambda;

  const auto greedy = [&](int state) {
    return q[state][0] >= q[state][1] ? 1 : 2;  // tie -> action 1
  };

  KahanSum rd_sum, ra_sum;
  for (long t = 1; t <= config.horizon; ++t) {
    const int d = sample_action(def_rng, pi_d.p[s]);
    int a;
    if (att_rng.next_double() < lam) {
      a = greedy(s);
    } else if (config.q_exploration == QExploration::kMixture) {
      a = sample_action(att_rng, config.stubborn[s]);
    } else {
      a = att_rng.next_double() < 0.5 ? 1 : 2;
    }
    const int s_next = state_of(d, a);
    const double rd = game.ud(d, a);
    const double ra = game.ua(d, a);
    rd_sum.add(rd);
    ra_sum.add(ra);
    const double ud_avg = rd_sum.s / static_cast<double>(t);
    const double ua_avg = ra_sum.s / static_cast<double>(t);

    const double q_next_max = std::max(q[s_next][0], q[s_next][1]);
    const double delta = ra - r_bar + q_next_max - q[s][a - 1];
    q[s][a - 1] += config.eps1 * delta;
    if (q[s][a - 1] == std::max(q[s][0], q[s][1])) {
      const double tt = static_cast<double>(t);
      r_bar = (1.0 - config.eps2) * r_bar +
              config.eps2 * ((tt - 1.0) * r_bar + ra) / tt;
    }

    if (keep_record(t, config.horizon))
      traj.records.push_back({t, s, d, a, rd, ra, ud_avg, ua_avg});
    s = s_next;
    traj.u_d_final = ud_avg;
    traj.u_a_final = ua_avg;
  }
  traj.q_table = q;
  traj.r_bar_a = r_bar;
  return traj;
}

std::vector<SweepCell> sweep_lambda(
    const StageGame& game,
    const std::vector<std::pair<std::string, MemoryOneStrategy>>& defenders,
    const std::vector<double>& lambdas, const SimulationConfig& config) {
  std::vector<SweepCell> out;
  for (const auto& [label, pd] : defenders) {
    for (double l : lambdas) {
      SimulationConfig cell = config;
      cell.lambda = l;
      char buf[64];
      std::snprintf(buf, sizeof buf, "cell:%s:%.17g:", label.c_str(), l);
      cell.stream_prefix = config.stream_prefix + buf;
      const Trajectory traj = cell.learner == Learner::kFictitiousPlay
                                  ? run_fictitious_play(game, pd, cell)
                                  : run_q_learning(game, pd, cell);
      out.push_back({label, l, cell.learner, traj.u_d_final, traj.u_a_final});
    }
  }
  return out;
}

}  // namespace zdsec
