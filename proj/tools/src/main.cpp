#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coevo/config.hpp"
#include "coevo/errors.hpp"
#include "coevo/fisher.hpp"
#include "coevo/molecule.hpp"
#include "coevo/runner.hpp"
#include "coevo/scenario.hpp"
#include "coevo/serialize.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw coevo::ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Wiring the file declares, independent of any trial: writer output key that
// some other atom lists as an input.
std::vector<coevo::EdgeRecord> declared_edges(const coevo::ActorMolecule& mol) {
  std::vector<coevo::EdgeRecord> edges;
  for (const coevo::Atom& w : mol.atoms) {
    for (const std::string& key : w.outputs) {
      for (const coevo::Atom& r : mol.atoms) {
        if (r.id == w.id) continue;
        for (const std::string& in : r.inputs) {
          if (in == key) edges.push_back({w.id, key, r.id});
        }
      }
    }
  }
  return edges;
}

void print_atom(const coevo::Atom& atom, const char* indent) {
  std::cout << indent << "atom " << atom.id << "  " << coevo::kind_name(atom.kind)
            << (atom.reflex ? "  [protected]" : "") << "\n";
  std::cout << indent << "  wake: "
            << (atom.activation.kind == coevo::ActivationKind::AlwaysOn
                    ? std::string("always-on")
                    : "signal(" + (atom.activation.input_index <
                                           static_cast<int>(atom.inputs.size())
                                       ? atom.inputs[static_cast<std::size_t>(
                                             atom.activation.input_index)]
                                       : std::string("?")) +
                          ")")
            << "\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s.empty() ? std::string("-") : s;
  };
  std::cout << indent << "  in:   " << join(atom.inputs) << "\n";
  std::cout << indent << "  out:  " << join(atom.outputs) << "\n";
}

void print_molecule(const coevo::ActorMolecule& mol) {
  std::cout << "molecule " << mol.id() << "  (" << mol.atoms.size() << " atoms)\n";
  for (const coevo::Atom& atom : mol.atoms) print_atom(atom, "  ");
  const auto edges = declared_edges(mol);
  std::cout << "  declared edges (" << edges.size() << "):\n";
  for (const auto& e : edges) {
    std::cout << "    " << e.writer << " --[" << e.key << "]--> " << e.reader << "\n";
  }
  const coevo::Signature sig = coevo::molecule_signature(mol, edges);
  std::cout << "  signature: " << sig.triples.size() << " edge labels, "
            << sig.kind_counts.size() << " kinds\n";
}

int cmd_inspect(const std::string& path) {
  const std::string text = read_file(path);
  // Population snapshots start with a meta line; store dumps with an entry
  // header. Try the snapshot parser first.
  try {
    const coevo::PopulationSnapshot snap = coevo::parse_population(text);
    std::cout << snap.molecules.size() << " molecules, " << snap.games.size()
              << " games\n\n";
    for (const auto& mol : snap.molecules) print_molecule(mol);
    if (!snap.games.empty()) {
      std::cout << "games:\n";
      for (const auto& game : snap.games) print_atom(game, "  ");
    }
    return 0;
  } catch (const coevo::ParseError&) {
    // fall through to the store format
  }
  const coevo::LongTermStore store = coevo::parse_ltm(text);
  std::cout << store.size() << " preserved designs\n\n";
  for (std::size_t i = 0; i < store.size(); ++i) {
    const coevo::LtmEntry& entry = store.entries()[i];
    std::cout << "entry " << i << "  origin generation " << entry.origin_generation
              << "\n";
    print_molecule(entry.molecule);
    for (std::size_t j = 0; j < store.size(); ++j) {
      if (j == i) continue;
      std::cout << "  similarity to entry " << j << ": "
                << coevo::signature_similarity(entry.signature,
                                               store.entries()[j].signature)
                << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-evolving actor/game molecules on a simulated two-joint arm"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  int generations = 50;
  std::string out_dir;
  int snapshot_every = 0;
  bool trace_trials = false;
  std::string scenario_name = "minimal";
  int jobs = 0;

  CLI::App* run = app.add_subcommand("run", "run the generational loop");
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--generations", generations, "evolution steps to run");
  run->add_option("--out", out_dir, "output directory (metrics, snapshots, manifest)");
  run->add_option("--snapshot-every", snapshot_every,
                  "write a population snapshot every N generations");
  run->add_flag("--trace-trials", trace_trials,
                "record working-memory writes of each generation's first trial");
  run->add_option("--scenario", scenario_name, "starting population")
      ->check(CLI::IsMember(coevo::scenario_names()));
  run->add_option("--jobs", jobs, "trial workers (overrides config)");

  int fc_actors = 64;
  int fc_loci = 8;
  int fc_replicates = 200;
  std::uint64_t fc_seed = 1;
  CLI::App* fisher = app.add_subcommand(
      "fisher-check", "one-generation selection-gain predictor check");
  fisher->add_option("--actors", fc_actors, "population size");
  fisher->add_option("--loci", fc_loci, "genome length");
  fisher->add_option("--replicates", fc_replicates, "seeded repetitions");
  fisher->add_option("--seed", fc_seed, "master seed");

  std::string inspect_path;
  CLI::App* inspect = app.add_subcommand(
      "inspect", "print a population snapshot or store dump as text");
  inspect->add_option("path", inspect_path, "snapshot or store file")->required();

  std::string gen_out = "data/scenarios";
  CLI::App* gen = app.add_subcommand("gen-scenarios",
                                     "write every shipped scenario as a population file");
  gen->add_option("--out", gen_out, "target directory");
  gen->add_option("--config", config_path, "key = value config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      coevo::RunConfig config =
          config_path.empty() ? coevo::RunConfig{} : coevo::load_config_file(config_path);
      if (jobs > 0) config.jobs = jobs;
      const coevo::Scenario scenario = coevo::build_scenario(scenario_name, config);
      coevo::RunOptions opts;
      opts.seed = seed;
      opts.generations = generations;
      opts.out_dir = out_dir;
      opts.snapshot_every = snapshot_every;
      opts.trace_trials = trace_trials;
      coevo::Runner runner(config, scenario, opts);
      runner.run();
      double best = 0.0;
      for (double f : runner.last_fitness()) best = std::max(best, f);
      std::cout << "run complete: scenario=" << scenario.name << " seed=" << seed
                << " generations=" << runner.generation() << " best_fitness=" << best
                << " preserved=" << runner.store().size() << " games="
                << runner.games().size() << "\n";
      if (!out_dir.empty()) std::cout << "artifacts in " << out_dir << "\n";
      return 0;
    }
    if (*fisher) {
      coevo::FisherCheckParams params;
      params.actors = fc_actors;
      params.loci = fc_loci;
      params.replicates = fc_replicates;
      params.seed = fc_seed;
      const coevo::FisherCheckReport report = coevo::run_fisher_check(params);
      std::printf("fisher-check: actors=%d loci=%d replicates=%d seed=%llu\n",
                  params.actors, params.loci, params.replicates,
                  static_cast<unsigned long long>(params.seed));
      auto line = [](const char* name, const coevo::FisherCheckMode& m) {
        std::printf("%-10s mean_rel_error=%.4f median=%.4f frac_over_25=%.3f\n", name,
                    m.mean_rel_error, m.median_rel_error, m.frac_over_25);
      };
      line("additive", report.additive);
      line("epistatic", report.epistatic);
      return 0;
    }
    if (*inspect) return cmd_inspect(inspect_path);
    if (*gen) {
      coevo::RunConfig config =
          config_path.empty() ? coevo::RunConfig{} : coevo::load_config_file(config_path);
      std::filesystem::create_directories(gen_out);
      for (const std::string& name : coevo::scenario_names()) {
        const coevo::Scenario s = coevo::build_scenario(name, config);
        const std::filesystem::path path =
            std::filesystem::path(gen_out) / (name + ".jsonl");
        std::ofstream out(path, std::ios::binary);
        out << coevo::serialize_population(s.molecules, s.games);
        std::cout << path.string() << "\n";
      }
      return 0;
    }
  } catch (const coevo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
