#include <string>

#include "coevo/config.hpp"
#include "coevo/errors.hpp"
#include "doctest.h"

using namespace coevo;

TEST_CASE("empty input yields the documented defaults") {
  RunConfig c = parse_config("");
  CHECK(c.population_size == 16);
  CHECK(c.jobs == 1);
  CHECK(c.engine.t_steps == 100);
  CHECK(c.engine.k_min == 5);
  CHECK(c.engine.eta == 0.1);
  CHECK(c.engine.baseline_beta == 0.2);
  CHECK(c.evolve.rate_a == 0.3);
  CHECK(c.evolve.rate_m == 0.05);
  CHECK(c.ltm.lambda == -1.0);
  CHECK(c.env.l1 == 1.0);
  CHECK_FALSE(c.env.obstructed);
  CHECK(c.mi_bins == 8);
}

TEST_CASE("comments, blanks, and every known key parse") {
  const std::string text =
      "# run shape\n"
      "population_size = 32\n"
      "jobs = 4\n"
      "\n"
      "t_steps = 250\n"
      "k_min = 3\n"
      "eta = 0.05\n"
      "baseline_beta = 0.1\n"
      "rate_a = 0.2\n"
      "rate_m = 0.01\n"
      "crossover_rate = 0.15\n"
      "game_rate = 0.4\n"
      "param_sigma = 0.02\n"
      "theta_fix = 0.8\n"
      "g_fix = 6\n"
      "lambda = 0.25\n"
      "link1 = 1.5   # trailing comment\n"
      "link2 = 0.75\n"
      "v_max = 2.0\n"
      "dt = 0.05\n"
      "joint_lo = -1.0\n"
      "joint_hi = 2.5\n"
      "obstructed = true\n"
      "obstruct_lo = 0.4\n"
      "obstruct_hi = 0.7\n"
      "start_shoulder = 0.1\n"
      "start_elbow = 0.3\n"
      "shc_sigma = 0.2\n"
      "shc_p_worse = 0.05\n"
      "mi_window = 32\n"
      "mi_bins = 4\n";
  RunConfig c = parse_config(text);
  CHECK(c.population_size == 32);
  CHECK(c.jobs == 4);
  CHECK(c.engine.t_steps == 250);
  CHECK(c.engine.k_min == 3);
  CHECK(c.engine.eta == 0.05);
  CHECK(c.engine.baseline_beta == 0.1);
  CHECK(c.evolve.rate_a == 0.2);
  CHECK(c.evolve.rate_m == 0.01);
  CHECK(c.evolve.crossover_rate == 0.15);
  CHECK(c.evolve.game_rate == 0.4);
  CHECK(c.evolve.param_sigma == 0.02);
  CHECK(c.ltm.theta_fix == 0.8);
  CHECK(c.ltm.g_fix == 6);
  CHECK(c.ltm.lambda == 0.25);
  CHECK(c.env.l1 == 1.5);
  CHECK(c.env.l2 == 0.75);
  CHECK(c.env.v_max == 2.0);
  CHECK(c.env.dt == 0.05);
  CHECK(c.env.joint_lo == -1.0);
  CHECK(c.env.joint_hi == 2.5);
  CHECK(c.env.obstructed);
  CHECK(c.env.obstruct_lo == 0.4);
  CHECK(c.env.obstruct_hi == 0.7);
  CHECK(c.env.start_shoulder == 0.1);
  CHECK(c.env.start_elbow == 0.3);
  CHECK(c.shc_sigma == 0.2);
  CHECK(c.shc_p_worse == 0.05);
  CHECK(c.mi_window == 32);
  CHECK(c.mi_bins == 4);
}

TEST_CASE("bad lines are rejected with their line number") {
  try {
    parse_config("t_steps = 50\nnot_a_key = 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  try {
    parse_config("t_steps = 50\n\nt_steps = 60\n");
    FAIL("expected ParseError");  // duplicate key
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }

  try {
    parse_config("eta = fast\n");
    FAIL("expected ParseError");  // unparsable value
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }

  CHECK_THROWS_AS(parse_config("just words\n"), ParseError);
  CHECK_THROWS_AS(parse_config("jobs = 1.5\n"), ParseError);        // int key
  CHECK_THROWS_AS(parse_config("obstructed = maybe\n"), ParseError);
}

TEST_CASE("dump and parse are inverse on a non-default config") {
  RunConfig c;
  c.population_size = 24;
  c.engine.t_steps = 123;
  c.engine.eta = 0.07;
  c.ltm.lambda = 0.5;
  c.env.obstructed = true;
  c.env.dt = 0.025;
  c.mi_bins = 6;

  const std::string text = dump_config(c);
  RunConfig back = parse_config(text);
  CHECK(dump_config(back) == text);

  CHECK(back.population_size == 24);
  CHECK(back.engine.t_steps == 123);
  CHECK(back.engine.eta == 0.07);
  CHECK(back.ltm.lambda == 0.5);
  CHECK(back.env.obstructed);
  CHECK(back.env.dt == 0.025);
  CHECK(back.mi_bins == 6);
}
