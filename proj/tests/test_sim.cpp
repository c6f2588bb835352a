#include "zdsec/sim.hpp"

#include <cmath>

#include "doctest.h"
#include "testutil.hpp"
#include "zdsec/best_response.hpp"

using namespace zdsec;
using test::fixture_game;
using test::fixture_stubborn;

namespace {

SimulationConfig base_config(Learner learner, double lambda, long horizon,
                             std::uint64_t seed = 7) {
  SimulationConfig c(fixture_stubborn());
  c.learner = learner;
  c.lambda = lambda;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  SimulationConfig c = base_config(Learner::kFictitiousPlay, 0.5, 100);
  c.horizon = 0;
  CHECK_THROWS_AS(run_fictitious_play(fixture_game(), strategy(0.5, 0.5, 0.5, 0.5), c),
                  InputDomainError);
  c.horizon = 10;
  c.lambda = 1.5;
  CHECK_THROWS_AS(run_fictitious_play(fixture_game(), strategy(0.5, 0.5, 0.5, 0.5), c),
                  InputDomainError);
  c.lambda = 0.5;
  c.eps1 = 0.0;
  CHECK_THROWS_AS(run_q_learning(fixture_game(), strategy(0.5, 0.5, 0.5, 0.5),
                                 [&] {
                                   SimulationConfig q = c;
                                   q.learner = Learner::kQLearning;
                                   return q;
                                 }()),
                  InputDomainError);
  // Learner/runner mismatch.
  CHECK_THROWS_AS(run_q_learning(fixture_game(), strategy(0.5, 0.5, 0.5, 0.5),
                                 base_config(Learner::kFictitiousPlay, 0, 10)),
                  InputDomainError);
}

TEST_CASE("single-stage run and exact running averages") {
  const StageGame g = fixture_game();
  const SimulationConfig c = base_config(Learner::kFictitiousPlay, 0.3, 1);
  const Trajectory t = run_fictitious_play(g, strategy(0.5, 0.5, 0.5, 0.5), c);
  REQUIRE(t.records.size() == 1);
  CHECK(t.records[0].t == 1);
  CHECK(t.u_d_final == g.ud(t.records[0].d, t.records[0].a));

  // Running averages match an independent rational accumulation.
  const SimulationConfig c2 = base_config(Learner::kQLearning, 0.4, 3000);
  const Trajectory t2 = run_q_learning(g, strategy(0.3, 0.8, 0.6, 0.2), c2);
  double acc = 0.0;
  long n = 0;
  for (const StageRecord& r : t2.records) {
    if (r.t != n + 1) break;  // dense prefix only
    acc += r.r_d;
    ++n;
    CHECK(std::abs(r.u_d_avg - acc / n) <= 1e-12);
  }
  CHECK(n == 1000);  // dense prefix covers the first 1000 stages
}

TEST_CASE("q-learning from the zero initialization") {
  const StageGame g = fixture_game();
  // One stage: exactly one Q cell moves, everything else stays at the
  // initialization; the average-reward update runs only under the gate.
  const SimulationConfig c = base_config(Learner::kQLearning, 0.5, 1);
  const Trajectory t = run_q_learning(g, strategy(0.5, 0.5, 0.5, 0.5), c);
  REQUIRE(t.records.size() == 1);
  int touched = 0;
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) touched += t.q_table[s][a] != 0.0;
  CHECK(touched <= 1);
  const StageRecord& r = t.records[0];
  CHECK(t.q_table[r.state][r.a - 1] == doctest::Approx(0.1 * r.r_a));
}

TEST_CASE("trajectory downsampling structure") {
  const StageGame g = fixture_game();
  const SimulationConfig c = base_config(Learner::kFictitiousPlay, 0.0, 12345);
  const Trajectory t = run_fictitious_play(g, strategy(0.5, 0.5, 0.5, 0.5), c);
  long prev = 0;
  for (const StageRecord& r : t.records) {
    CHECK(r.t > prev);
    if (r.t > 1000 && r.t != c.horizon) CHECK(r.t % 100 == 0);
    prev = r.t;
  }
  CHECK(t.records.back().t == c.horizon);
}

TEST_CASE("bit-identical reruns, distinct seeds differ") {
  const StageGame g = fixture_game();
  const MemoryOneStrategy pd = strategy(0.6, 0.4, 0.7, 0.3);
  const SimulationConfig c = base_config(Learner::kQLearning, 0.5, 20000);
  const Trajectory a = run_q_learning(g, pd, c);
  const Trajectory b = run_q_learning(g, pd, c);
  CHECK(a.u_d_final == b.u_d_final);
  CHECK(a.u_a_final == b.u_a_final);
  CHECK(a.q_table == b.q_table);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].d == b.records[i].d);
    CHECK(a.records[i].a == b.records[i].a);
    CHECK(a.records[i].u_d_avg == b.records[i].u_d_avg);
  }
  SimulationConfig c2 = c;
  c2.seed = 8;
  const Trajectory d = run_q_learning(g, pd, c2);
  CHECK(a.u_d_final != d.u_d_final);

  const SimulationConfig f = base_config(Learner::kFictitiousPlay, 0.5, 20000);
  const Trajectory fa = run_fictitious_play(g, pd, f);
  const Trajectory fb = run_fictitious_play(g, pd, f);
  CHECK(fa.u_d_final == fb.u_d_final);
  CHECK(fa.pi_d_hat.p == fb.pi_d_hat.p);
}

TEST_CASE("frequency estimate converges to the defender strategy") {
  const StageGame g = fixture_game();
  const MemoryOneStrategy pd = strategy(0.35, 0.7, 0.55, 0.25);
  const SimulationConfig c = base_config(Learner::kFictitiousPlay, 0.5, 100000);
  const Trajectory t = run_fictitious_play(g, pd, c);
  CHECK(linf_diff(t.pi_d_hat.p, pd.p) <= 0.02);
  // Rows stay probabilities throughout.
  for (int s = 0; s < 4; ++s) {
    CHECK(t.pi_d_hat.p[s] >= 0.0);
    CHECK(t.pi_d_hat.p[s] <= 1.0);
  }
}

TEST_CASE("stubborn endpoint: both learners reproduce the closed form") {
  const StageGame g = fixture_game();
  const MemoryOneStrategy pd = strategy(0.7, 0.4, 0.6, 0.3);
  const double target = stubborn_utilities(g, pd, fixture_stubborn()).u_d;
  const Trajectory fp = run_fictitious_play(
      g, pd, base_config(Learner::kFictitiousPlay, 0.0, 100000));
  CHECK(std::abs(fp.u_d_final - target) <= 0.05);
  const Trajectory q =
      run_q_learning(g, pd, base_config(Learner::kQLearning, 0.0, 100000));
  CHECK(std::abs(q.u_d_final - target) <= 0.05);
  // Untouched Q-table stays at the zero initialization in mixture mode.
  // (The stubborn strategy never plays target 2 from states 11/21, so those
  // (state, action-2) cells keep their initial value.)
  CHECK(q.q_table[kS11][1] == 0.0);
  CHECK(q.q_table[kS21][1] == 0.0);
}

TEST_CASE("rational endpoint: learners track the best-response oracle") {
  const StageGame g = fixture_game();

  // Fictitious play: defender with a wide best-response margin, robust to
  // the uniform prior on rarely visited states.
  const MemoryOneStrategy pd_fp = strategy(0.6, 0.65, 0.7, 0.6);
  const BestResponseResult br_fp = best_response(g, pd_fp);
  const Trajectory fp = run_fictitious_play(
      g, pd_fp, base_config(Learner::kFictitiousPlay, 1.0, 100000));
  CHECK(std::abs(fp.u_d_final - br_fp.defender_value) <= 0.05);

  // Q-learning: greedy-only at this endpoint, so the defender is one whose
  // best response the zero-initialized argmax can reach (keep attacking 1).
  const MemoryOneStrategy pd_q = strategy(0.2, 0.2, 0.2, 0.2);
  const BestResponseResult br_q = best_response(g, pd_q);
  const Trajectory q = run_q_learning(
      g, pd_q, base_config(Learner::kQLearning, 1.0, 1000000));
  CHECK(std::abs(q.u_a_final - br_q.attacker_value) <= 0.1);
  CHECK(std::abs(q.u_d_final - br_q.defender_value) <= 0.1);
}

TEST_CASE("uniform exploration mode visits everything") {
  const StageGame g = fixture_game();
  SimulationConfig c = base_config(Learner::kQLearning, 0.5, 50000);
  c.q_exploration = QExploration::kUniform;
  const Trajectory t = run_q_learning(g, strategy(0.5, 0.5, 0.5, 0.5), c);
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) CHECK(t.q_table[s][a] != 0.0);
}

TEST_CASE("lambda sweep: cell structure and determinism") {
  const StageGame g = fixture_game();
  const SimulationConfig c = base_config(Learner::kFictitiousPlay, 0.0, 5000);

  CHECK(sweep_lambda(g, {{"zd", strategy(1, 1, 1, 0)}}, {}, c).empty());

  const std::vector<std::pair<std::string, MemoryOneStrategy>> defenders = {
      {"zd", strategy(1, 1, 1, 0)}, {"sse", strategy(0.33, 0.33, 0.33, 0.33)}};
  const std::vector<double> lambdas{0.1, 0.9};
  const auto table = sweep_lambda(g, defenders, lambdas, c);
  REQUIRE(table.size() == 4);
  CHECK(table[0].label == "zd");
  CHECK(table[0].lambda == 0.1);
  CHECK(table[3].label == "sse");
  CHECK(table[3].lambda == 0.9);
  const auto again = sweep_lambda(g, defenders, lambdas, c);
  for (std::size_t i = 0; i < table.size(); ++i)
    CHECK(table[i].u_d_final == again[i].u_d_final);
  // Different cells draw from different substreams.
  CHECK(table[0].u_d_final != table[2].u_d_final);
}
