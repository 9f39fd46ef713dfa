#include <benchmark/benchmark.h>

#include "coevo/engine.hpp"
#include "coevo/mutual_info.hpp"
#include "coevo/rng.hpp"
#include "coevo/scenario.hpp"
#include "coevo/serialize.hpp"

using namespace coevo;

namespace {

Scenario scenario_for(const std::string& name) {
  RunConfig c;
  return build_scenario(name, c);
}

}  // namespace

static void BM_TrialExplorationChain(benchmark::State& st) {
  const Scenario sc = scenario_for("resistance");
  TrialSpec spec;
  spec.molecule = &sc.molecules[0];
  spec.games = &sc.games;
  spec.t_steps = static_cast<int>(st.range(0));
  spec.env.obstructed = true;
  std::uint64_t seed = 1;
  for (auto _ : st) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(run_trial(spec));
  }
  st.counters["steps/s"] = benchmark::Counter(
      static_cast<double>(st.iterations()) * spec.t_steps, benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TrialExplorationChain)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_TrialReachingBranches(benchmark::State& st) {
  const Scenario sc = scenario_for("reaching_two_path");
  TrialSpec spec;
  spec.molecule = &sc.molecules[0];
  spec.games = &sc.games;
  spec.t_steps = 200;
  std::uint64_t seed = 1;
  for (auto _ : st) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(run_trial(spec));
  }
}
BENCHMARK(BM_TrialReachingBranches)->Unit(benchmark::kMillisecond);

static void BM_AssessPopulation(benchmark::State& st) {
  RunConfig c;
  const Scenario sc = scenario_for("resistance");
  std::vector<ActorMolecule> pop;
  IdAllocator ids(100);
  KeyMinter minter;
  for (int i = 0; i < st.range(0); ++i)
    pop.push_back(clone_molecule(sc.molecules[0], ids, minter));
  EngineParams eng;
  eng.t_steps = 50;
  eng.k_min = 2;
  EnvParams env;
  env.obstructed = true;
  std::uint64_t gen = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        assess_fitness(pop, sc.games, eng, env, {}, {}, 9, gen++, 1));
  }
}
BENCHMARK(BM_AssessPopulation)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SignatureSimilarity(benchmark::State& st) {
  const Scenario sc = scenario_for("resistance");
  TrialSpec spec;
  spec.molecule = &sc.molecules[0];
  spec.seed = 3;
  spec.t_steps = 50;
  spec.env.obstructed = true;
  const TrialResult res = run_trial(spec);
  const Signature sig = molecule_signature(sc.molecules[0], res.extracted.edges);
  for (auto _ : st) benchmark::DoNotOptimize(signature_similarity(sig, sig));
}
BENCHMARK(BM_SignatureSimilarity);

static void BM_MutualInfoWindow(benchmark::State& st) {
  Rng rng = make_rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 256; ++i) {
    const double x = u(rng);
    samples.emplace_back(x, 0.7 * x + 0.3 * u(rng));
  }
  for (auto _ : st) {
    MiEstimator est(8, 0.0, 1.0, 0.0, 1.0);
    for (const auto& [x, y] : samples) est.add(x, y);
    benchmark::DoNotOptimize(est.estimate_bits());
  }
}
BENCHMARK(BM_MutualInfoWindow);

static void BM_PopulationRoundTrip(benchmark::State& st) {
  const Scenario sc = scenario_for("reaching_two_path");
  const std::string text = serialize_population(sc.molecules, sc.games);
  for (auto _ : st) {
    PopulationSnapshot snap = parse_population(text);
    benchmark::DoNotOptimize(serialize_population(snap.molecules, snap.games));
  }
  st.counters["bytes"] = static_cast<double>(text.size());
}
BENCHMARK(BM_PopulationRoundTrip)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
