#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coevo/env.hpp"
#include "coevo/molecule.hpp"

namespace coevo {

struct EngineParams {
  int t_steps = 100;           // steps per trial unless a Terminator fires earlier
  int k_min = 5;               // trials per (molecule, initiator) per assessment
  double eta = 0.1;            // path-competition learning rate
  double baseline_beta = 0.2;  // EMA rate for branch reward baselines
};

using AtomStates = std::map<Id, AtomState>;

// Competition weight per wake-gated atom; atoms whose SignalTrue rules listen
// to the same key form a branch point and one of them is drawn per trial in
// proportion to these weights. Unlisted atoms weigh 1.
using PathWeights = std::map<Id, double>;

double path_weight(const PathWeights& weights, Id id);

inline constexpr Id kNoInitiator = -1;

struct TrialSpec {
  const ActorMolecule* molecule = nullptr;
  const std::vector<Atom>* games = nullptr;  // optional observer set
  // 0 picks the lowest-id eligible starter (none eligible -> empty trial);
  // kNoInitiator runs with nothing self-started; an explicit id must be
  // eligible or the trial throws NoInitiator.
  Id initiator = 0;
  std::uint64_t seed = 0;
  int t_steps = 100;
  bool trace = false;
  const AtomStates* states = nullptr;    // starting states (else seeded fresh)
  const PathWeights* weights = nullptr;  // branch weights (else uniform)
  EnvParams env;
  std::optional<Point2> object;                          // overrides the sampled object
  std::optional<std::pair<double, double>> start_pose;   // shoulder, elbow
};

struct TrialResult {
  ExtractedMolecule extracted;
  int steps = 0;
  bool terminated = false;
  int miswirings = 0;
  std::map<Id, double> components;  // terminal game id -> fitness component
  std::vector<std::pair<std::string, Id>> branch_winners;  // wake key -> sampled atom
  AtomStates states;  // post-trial state of every atom that stepped
  std::vector<TraceRecord> trace;
  std::vector<MotorCoercion> coercions;
};

// AlwaysOn atoms whose inputs all carry sensor/ or motor/ prefixes; these are
// the only atoms that can start a trial on their own.
std::vector<Id> eligible_initiators(const ActorMolecule& m);

// Static association: the game scores this molecule when some atom writes a
// key the game observes.
bool game_observes(const Atom& game, const ActorMolecule& m);

// Draws one id in proportion to weight. Throws AllZeroWeights when the mass
// is zero (the trial runner resets such branches to uniform before drawing).
Id sample_weighted(const std::vector<std::pair<Id, double>>& entries, Rng& rng);

TrialResult run_trial(const TrialSpec& spec);

// --- path-competition bookkeeping -------------------------------------------
// For each branch the trial sampled, the winner's weight moves by the
// Oja-style update fed with the trial reward's advantage over that branch
// point's EMA baseline (clamped to +-1). Keeping the baseline per wake key
// makes above-baseline branches grow and starves the rest.
struct PathBaselines {
  std::map<std::string, double> ema;
};

void apply_path_reward(const TrialResult& trial, double reward, PathWeights& weights,
                       PathBaselines& baselines, double eta, double beta);

// --- population assessment ----------------------------------------------------

struct AssessmentResult {
  // Index-aligned with the assessed molecule / game lists.
  std::vector<double> actor_fitness;  // sum over associated games of F(a,g)
  std::vector<int> actor_trials;
  std::vector<Signature> signatures;  // realized-edge signature per molecule
  std::vector<double> game_fitness;   // n-1 variance of components across actors
  std::vector<int> game_samples;
  AtomStates folded_states;  // per atom: state after its highest-indexed trial
  int miswirings = 0;
  std::vector<TrialResult> trials;          // deterministic plan order
  std::vector<std::size_t> trial_molecule;  // plan index -> molecule index
  std::vector<double> trial_rewards;        // plan index -> associated-component sum
};

// Runs the deterministic round-robin plan: k_min rounds over every
// (molecule, eligible initiator) pair — molecules without initiators still
// get k_min empty trials so their games score them. Every trial starts from
// `states` and samples branches from `weights` (both frozen for the whole
// assessment), so `jobs` workers change nothing but wall time. F(a,g) is the
// mean per-trial component, robust to unequal trial counts across molecules.
AssessmentResult assess_fitness(const std::vector<ActorMolecule>& molecules,
                                const std::vector<Atom>& games,
                                const EngineParams& eng, const EnvParams& env,
                                const AtomStates& states, const PathWeights& weights,
                                std::uint64_t master_seed, std::uint64_t generation,
                                int jobs = 1);

}  // namespace coevo
