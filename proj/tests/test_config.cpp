#include "zdsec/config.hpp"

#include <cmath>

#include "doctest.h"
#include "zdsec/rng.hpp"

using namespace zdsec;

namespace {

const char* kFixtureText = R"(# comment
[game]
mode = payoffs

[payoffs]
u_d = 5 1 ; 0 4
u_a = 1 5 ; 4 2

[stubborn]
p = 1 0.5 1 0.5

[solver]
coarse_step = 0.2
refine_rounds = 3

[analysis]
lambda_step = 0.05

[simulation]
horizon = 1234
lambdas = 0.1 0.9
q_exploration = uniform
)";

}  // namespace

TEST_CASE("direct-payoff config parses with all options") {
  const GameConfig cfg = parse_config(kFixtureText, "mem.cfg");
  CHECK(cfg.game.u_d[0][0] == 5.0);
  CHECK(cfg.game.u_a[1][0] == 4.0);
  CHECK(cfg.game.satisfies_assumption1());
  CHECK(cfg.warnings.empty());
  CHECK(cfg.stubborn_raw.p[1] == 0.5);
  CHECK(cfg.solver.coarse_step == 0.2);
  CHECK(cfg.solver.refine_rounds == 3);
  CHECK(cfg.analysis.lambda_step == 0.05);
  CHECK(cfg.analysis.sweep_step == 0.1);  // default
  CHECK(cfg.sim.horizon == 1234);
  CHECK(cfg.sim.lambdas == std::vector<double>{0.1, 0.9});
  CHECK(cfg.sim.q_exploration == QExploration::kUniform);
  CHECK(!cfg.config_hash.empty());
}

TEST_CASE("template expansion matches the cost structure") {
  const char* text = R"(
[game]
mode = mtd

[mtd]
y1 = 1.0
y2 = 0.5
c1 = 0.3
c2 = 0.2
theta = 0.6
d1 = 4 1 0 3
d0 = 1 0 0 1
a1 = -2 3 1 -1
a0 = 0 2 3 1
)";
  const GameConfig cfg = parse_config(text, "mtd.cfg");
  REQUIRE(cfg.mtd.has_value());
  // Defender row 1 pays half of y2; row 2 half of y1. Attacker pays c per
  // target column.
  CHECK(cfg.game.u_d[0][0] == doctest::Approx(4 * 0.6 + 1 - 0.25));
  CHECK(cfg.game.u_d[0][1] == doctest::Approx(1 * 0.6 + 0 - 0.25));
  CHECK(cfg.game.u_d[1][0] == doctest::Approx(0 * 0.6 + 0 - 0.5));
  CHECK(cfg.game.u_d[1][1] == doctest::Approx(3 * 0.6 + 1 - 0.5));
  CHECK(cfg.game.u_a[0][0] == doctest::Approx(-2 * 0.6 + 0 - 0.3));
  CHECK(cfg.game.u_a[0][1] == doctest::Approx(3 * 0.6 + 2 - 0.2));
  CHECK(cfg.game.u_a[1][0] == doctest::Approx(1 * 0.6 + 3 - 0.3));
  CHECK(cfg.game.u_a[1][1] == doctest::Approx(-1 * 0.6 + 1 - 0.2));

  // Zero-cost, zero-slope template reduces to the constant terms.
  const char* flat = R"(
[game]
mode = mtd
[mtd]
y1 = 0
y2 = 0
c1 = 0
c2 = 0
theta = 0
d1 = 9 9 9 9
d0 = 5 1 0 4
a1 = 9 9 9 9
a0 = 1 5 4 2
)";
  const GameConfig f = parse_config(flat, "flat.cfg");
  CHECK(f.game.u_d[0][0] == 5.0);
  CHECK(f.game.u_d[1][1] == 4.0);
  CHECK(f.game.u_a[0][1] == 5.0);

  // Round trip: re-expansion reproduces the linear reward relations for
  // random parameter draws.
  CounterRng rng(61, "mtd-roundtrip");
  for (int i = 0; i < 100; ++i) {
    MtdParams p;
    p.y1 = rng.uniform(0, 2);
    p.y2 = rng.uniform(0, 2);
    p.c1 = rng.uniform(0, 2);
    p.c2 = rng.uniform(0, 2);
    p.theta = rng.next_double();
    for (int s = 0; s < 4; ++s) {
      p.d1[s] = rng.uniform(-3, 3);
      p.d0[s] = rng.uniform(-3, 3);
      p.a1[s] = rng.uniform(-3, 3);
      p.a0[s] = rng.uniform(-3, 3);
    }
    const StageGame g = expand_mtd(p);
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j = 0; j < 2; ++j) {
        const int s = i2 * 2 + j;
        const double rd = p.d1[s] * p.theta + p.d0[s];
        const double ra = p.a1[s] * p.theta + p.a0[s];
        CHECK(g.u_d[i2][j] + (i2 == 0 ? p.y2 : p.y1) / 2.0 ==
              doctest::Approx(rd).epsilon(1e-14));
        CHECK(g.u_a[i2][j] + (j == 0 ? p.c1 : p.c2) ==
              doctest::Approx(ra).epsilon(1e-14));
      }
  }
}

TEST_CASE("errors carry position and field names") {
  // Parse error with line/column.
  try {
    parse_config("[game]\nmode == payoffs\nbad line\n", "x.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
  }

  // Missing field names the field.
  try {
    parse_config("[game]\nmode = payoffs\n[payoffs]\nu_d = 5 1 ; 0 4\n",
                 "y.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("u_a") != std::string::npos);
  }

  // Both specification modes present.
  CHECK_THROWS_AS(parse_config("[game]\nmode = payoffs\n[payoffs]\nu_d = 5 1 "
                               "; 0 4\nu_a = 1 5 ; 4 2\n[mtd]\ny1 = 1\n",
                               "z.cfg"),
                  ConfigError);

  // Unknown enum value.
  CHECK_THROWS_AS(
      parse_config("[game]\nmode = coinflip\n", "w.cfg"), ConfigError);

  // Non-numeric value.
  try {
    parse_config("[game]\nmode = payoffs\n[payoffs]\nu_d = a b ; c d\nu_a = "
                 "1 5 ; 4 2\n",
                 "n.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("n.cfg:4") != std::string::npos);
  }
}

TEST_CASE("assumption violations surface as warnings") {
  const char* text = R"(
[game]
mode = payoffs
[payoffs]
u_d = 5 1 ; 0 4
u_a = 9 5 ; 4 2
[stubborn]
p = 0.4 0.5 1 0.5
)";
  const GameConfig cfg = parse_config(text, "warn.cfg");
  REQUIRE(cfg.warnings.size() == 2);
  CHECK(cfg.warnings[0].find("U11^a < U12^a") != std::string::npos);
  CHECK(cfg.warnings[1].find("stubborn") != std::string::npos);
  CHECK_THROWS_AS(cfg.stubborn(), InputDomainError);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
}
