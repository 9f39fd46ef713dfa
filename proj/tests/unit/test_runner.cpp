#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/runner.hpp"
#include "coevo/scenario.hpp"
#include "coevo/serialize.hpp"
#include "doctest.h"

using namespace coevo;
namespace fs = std::filesystem;

namespace {

RunConfig quick_config() {
  RunConfig c;
  c.population_size = 4;
  c.engine.t_steps = 10;
  c.engine.k_min = 2;
  c.ltm.lambda = 0.0;
  return c;
}

Runner make_runner(const RunConfig& c, const RunOptions& opts,
                   const std::string& scenario = "minimal") {
  RunConfig cfg = c;
  Scenario sc = build_scenario(scenario, cfg);
  apply_scenario(sc, cfg);
  return Runner(cfg, sc, opts);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("coevo_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("a minimal run produces the documented metrics schema") {
  RunOptions opts;
  opts.seed = 5;
  opts.generations = 3;
  Runner r = make_runner(quick_config(), opts);
  r.run();

  const std::string& csv = r.metrics_csv();
  REQUIRE(!csv.empty());
  CHECK(csv.rfind("generation,entity,id,fitness,samples\n", 0) == 0);

  // Rows for every generation 0..N inclusive: the final assessment is
  // recorded even though nothing evolves after it.
  for (int g = 0; g <= 3; ++g) {
    const std::string tag = "\n" + std::to_string(g) + ",actor_molecule,";
    CHECK(csv.find(tag) != std::string::npos);
  }
  CHECK(csv.find(",game,") != std::string::npos);
  CHECK(r.history().size() == 3);
  CHECK(r.generation() == 3);
}

TEST_CASE("the echo start scores its designed fitness in generation zero") {
  // One accumulator echoing a constant sensor: with a frozen start pose the
  // elbow angle stays 0.2 until motors act, and nothing in this molecule
  // drives motors. Component = sum over steps of the running echo.
  RunConfig c = quick_config();
  c.population_size = 1;
  c.evolve.rate_a = 0.0;
  c.evolve.rate_m = 0.0;
  c.evolve.crossover_rate = 0.0;
  c.evolve.game_rate = 0.0;
  RunOptions opts;
  opts.seed = 9;
  opts.generations = 0;
  Runner r = make_runner(c, opts);
  r.run();

  REQUIRE(r.last_fitness().size() == 1);
  // decay 0: acc = elbow angle = 0.2 each of the 50 steps; the observer sums.
  CHECK(r.last_fitness()[0] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("identical seeds reproduce runs byte for byte") {
  RunConfig c = quick_config();
  RunOptions opts;
  opts.seed = 31;
  opts.generations = 4;

  Runner a = make_runner(c, opts, "resistance");
  a.run();
  Runner b = make_runner(c, opts, "resistance");
  b.run();
  CHECK(a.metrics_csv() == b.metrics_csv());
  CHECK(serialize_population(a.molecules(), a.games()) ==
        serialize_population(b.molecules(), b.games()));

  // Worker count changes wall time only.
  RunConfig cj = c;
  cj.jobs = 4;
  Runner p = make_runner(cj, opts, "resistance");
  p.run();
  CHECK(p.metrics_csv() == a.metrics_csv());
  CHECK(serialize_population(p.molecules(), p.games()) ==
        serialize_population(a.molecules(), a.games()));

  // A different seed diverges.
  RunOptions other = opts;
  other.seed = 32;
  Runner q = make_runner(c, other, "resistance");
  q.run();
  CHECK(q.metrics_csv() != a.metrics_csv());
}

TEST_CASE("output files land under the requested directory") {
  TempDir dir("outputs");
  RunConfig c = quick_config();
  RunOptions opts;
  opts.seed = 7;
  opts.generations = 4;
  opts.out_dir = dir.path.string();
  opts.snapshot_every = 2;
  opts.trace_trials = true;

  Runner r = make_runner(c, opts);
  r.run();

  CHECK(fs::exists(dir.path / "manifest.txt"));
  CHECK(fs::exists(dir.path / "metrics.csv"));
  CHECK(fs::exists(dir.path / "population_final.jsonl"));
  CHECK(fs::exists(dir.path / "ltm.jsonl"));
  CHECK(fs::exists(dir.path / "trace.jsonl"));
  CHECK(fs::exists(dir.path / "population_gen000002.jsonl"));
  CHECK(fs::exists(dir.path / "population_gen000004.jsonl"));
  CHECK_FALSE(fs::exists(dir.path / "population_gen000001.jsonl"));

  CHECK(slurp(dir.path / "metrics.csv") == r.metrics_csv());
  const std::string manifest = slurp(dir.path / "manifest.txt");
  CHECK(manifest.rfind("format = coevo-run/1\n", 0) == 0);
  CHECK(manifest.find("seed = 7") != std::string::npos);
  CHECK(manifest.find("scenario = minimal") != std::string::npos);
  CHECK(!slurp(dir.path / "trace.jsonl").empty());

  // The final population file parses back to the final population.
  PopulationSnapshot snap = parse_population(slurp(dir.path / "population_final.jsonl"));
  CHECK(serialize_population(snap.molecules, snap.games) ==
        serialize_population(r.molecules(), r.games()));
}

TEST_CASE("runs refuse to start without molecules") {
  RunConfig c = quick_config();
  RunOptions opts;
  CHECK_THROWS_AS(Runner(c, {}, {}, opts), ValidationFailure);
}

TEST_CASE("a negative lambda auto-scales from the first assessment") {
  RunConfig c = quick_config();
  c.ltm.lambda = -1.0;
  RunOptions opts;
  opts.seed = 3;
  opts.generations = 1;
  Runner r = make_runner(c, opts);
  CHECK(r.lambda() == 0.0);  // unresolved until fitness exists
  r.step_generation();
  const auto [lo, hi] =
      std::minmax_element(r.last_fitness().begin(), r.last_fitness().end());
  CHECK(r.lambda() == doctest::Approx(0.5 * (*hi - *lo)));

  // An explicit lambda is taken as-is.
  RunConfig c2 = quick_config();
  c2.ltm.lambda = 0.75;
  Runner r2 = make_runner(c2, opts);
  CHECK(r2.lambda() == 0.75);
}

TEST_CASE("population growth is capped at the configured size") {
  RunConfig c = quick_config();
  c.population_size = 4;
  RunOptions opts;
  opts.seed = 13;
  opts.generations = 6;
  Runner r = make_runner(c, opts, "resistance");
  r.run();
  CHECK(r.molecules().size() <= 4);
  CHECK(!r.games().empty());
  CHECK(r.history().back().game_count == r.games().size());
  CHECK_NOTHROW(validate_population(r.molecules(), r.games()));
}
