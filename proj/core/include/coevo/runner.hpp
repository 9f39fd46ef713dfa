#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coevo/config.hpp"
#include "coevo/engine.hpp"
#include "coevo/evolution.hpp"
#include "coevo/ltm.hpp"
#include "coevo/scenario.hpp"

namespace coevo {

struct RunOptions {
  std::uint64_t seed = 1;
  int generations = 50;
  std::string out_dir;        // when set: manifest, metrics, snapshots, store dump
  int snapshot_every = 0;     // extra population snapshots every N generations
  bool trace_trials = false;  // record the first planned trial of each generation
};

struct GenerationStats {
  std::uint64_t generation = 0;
  double best_fitness = 0.0;  // population slice, unpenalized
  double mean_fitness = 0.0;
  int miswirings = 0;
  bool transferred = false;  // a fixated design moved to the store this generation
  std::size_t store_size = 0;
  std::size_t game_count = 0;
};

// Owns one run: assessment, path competition, fixation transfer, selection,
// and game evolution, generation by generation. Everything derives from
// (config, starting population, seed); the worker count changes wall time
// only, never a byte of output.
class Runner {
 public:
  Runner(const RunConfig& config, const Scenario& scenario, const RunOptions& opts);
  Runner(const RunConfig& config, std::vector<ActorMolecule> molecules,
         std::vector<Atom> games, const RunOptions& opts);

  // One full generation; stats also land in history().
  GenerationStats step_generation();

  // Assessment and metrics rows only — no learning, no evolution, no state
  // advance. run() ends with one of these so the final population's fitness
  // is always on record (and a zero-generation run still assesses once).
  void assess_and_record();

  // opts.generations steps plus all file outputs under opts.out_dir.
  void run();

  const RunConfig& config() const { return config_; }
  const std::vector<ActorMolecule>& molecules() const { return molecules_; }
  const std::vector<Atom>& games() const { return games_; }
  const LongTermStore& store() const { return store_; }
  const PathWeights& path_weights() const { return weights_; }
  const std::vector<GenerationStats>& history() const { return history_; }
  double lambda() const { return lambda_; }
  std::uint64_t generation() const { return generation_; }
  std::optional<std::uint64_t> first_fixation() const { return first_fixation_; }

  // Most recent assessment view of the population slice (index-aligned with
  // molecules()).
  const std::vector<Signature>& last_signatures() const { return last_signatures_; }
  const std::vector<double>& last_fitness() const { return last_fitness_; }

  const std::string& metrics_csv() const { return metrics_; }
  const std::string& trace_log() const { return trace_; }
  std::string manifest() const;

  // Writes manifest.txt, metrics.csv, population_final.jsonl, ltm.jsonl and
  // (when tracing) trace.jsonl under opts.out_dir.
  void write_outputs() const;

 private:
  void init(std::vector<ActorMolecule> molecules, std::vector<Atom> games);
  void transfer_fixated(const Signature& sig, const std::vector<double>& fitness,
                        const std::vector<Signature>& sigs,
                        std::optional<std::size_t> stale_slot);
  void copy_states_positional(const ActorMolecule& parent, const ActorMolecule& child);
  void prune_states();
  void write_file(const std::string& name, const std::string& content) const;

  RunConfig config_;
  RunOptions opts_;
  std::string scenario_name_ = "custom";

  std::vector<ActorMolecule> molecules_;
  std::vector<Atom> games_;
  AtomStates states_;
  PathWeights weights_;
  PathBaselines baselines_;
  LongTermStore store_;
  FixationDetector fixation_;
  IdAllocator ids_;
  KeyMinter minter_;
  KeyPools pools_;

  double lambda_ = 0.0;
  bool lambda_pending_ = false;  // auto-scale from the first assessment
  std::uint64_t generation_ = 0;
  std::optional<std::uint64_t> first_fixation_;

  std::vector<Signature> last_signatures_;
  std::vector<double> last_fitness_;
  std::vector<GenerationStats> history_;
  std::string metrics_;
  std::string trace_;
};

}  // namespace coevo
