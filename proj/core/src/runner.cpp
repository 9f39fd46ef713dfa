#include "coevo/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "json.hpp"

#include "coevo/serialize.hpp"

namespace coevo {

namespace {

// Per-generation derivation tags; trial seeds use their own scheme inside
// assess_fitness, so these only have to be distinct from each other.
constexpr std::uint64_t kSelectionStream = 0x5E1EC7ED;
constexpr std::uint64_t kGameStream = 0x6A3E5;
constexpr std::uint64_t kRefillStream = 0x2EF111;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json value_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Signal:
      return v.as_signal();
    case ValueKind::Scalar:
      return v.as_scalar();
    case ValueKind::Vec:
      return nlohmann::json(v.as_vec());
  }
  return nullptr;
}

}  // namespace

Runner::Runner(const RunConfig& config, const Scenario& scenario, const RunOptions& opts)
    : config_(config),
      opts_(opts),
      scenario_name_(scenario.name),
      fixation_(config.ltm.theta_fix, config.ltm.g_fix) {
  apply_scenario(scenario, config_);
  init(scenario.molecules, scenario.games);
}

Runner::Runner(const RunConfig& config, std::vector<ActorMolecule> molecules,
               std::vector<Atom> games, const RunOptions& opts)
    : config_(config), opts_(opts), fixation_(config.ltm.theta_fix, config.ltm.g_fix) {
  init(std::move(molecules), std::move(games));
}

void Runner::init(std::vector<ActorMolecule> molecules, std::vector<Atom> games) {
  molecules_ = std::move(molecules);
  games_ = std::move(games);
  if (molecules_.empty()) throw ValidationFailure("a run needs at least one molecule");
  validate_population(molecules_, games_);

  for (const ActorMolecule& mol : molecules_) {
    for (const Atom& atom : mol.atoms) {
      ids_.bump_past(atom.id);
      for (const std::string& k : atom.inputs) minter_.bump_past(k);
      for (const std::string& k : atom.outputs) minter_.bump_past(k);
    }
  }
  for (const Atom& game : games_) {
    ids_.bump_past(game.id);
    for (const std::string& k : game.inputs) minter_.bump_past(k);
    for (const std::string& k : game.outputs) minter_.bump_past(k);
  }

  const ArmEnv probe(config_.env);
  for (const auto& [key, value] : probe.read_sensors()) pools_.sensors.push_back(key);
  pools_.motors = ArmEnv::motor_keys();

  // Seed molecules keep their protection; fill-in clones are fair game for
  // selection from the start.
  const std::size_t originals = molecules_.size();
  while (molecules_.size() < static_cast<std::size_t>(config_.population_size)) {
    const ActorMolecule& src = molecules_[molecules_.size() % originals];
    molecules_.push_back(clone_molecule(src, ids_, minter_));
  }

  lambda_ = config_.ltm.lambda;
  lambda_pending_ = lambda_ < 0.0;
  if (lambda_pending_) lambda_ = 0.0;

  metrics_ = "generation,entity,id,fitness,samples\n";
}

void Runner::copy_states_positional(const ActorMolecule& parent,
                                    const ActorMolecule& child) {
  const std::size_t n = std::min(parent.atoms.size(), child.atoms.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (parent.atoms[i].kind != child.atoms[i].kind) continue;
    auto it = states_.find(parent.atoms[i].id);
    if (it != states_.end()) states_[child.atoms[i].id] = it->second;
  }
}

void Runner::prune_states() {
  std::set<Id> live;
  for (const ActorMolecule& mol : molecules_) {
    for (const Atom& atom : mol.atoms) live.insert(atom.id);
  }
  for (const LtmEntry& entry : store_.entries()) {
    for (const Atom& atom : entry.molecule.atoms) live.insert(atom.id);
  }
  for (auto it = states_.begin(); it != states_.end();) {
    it = live.count(it->first) ? std::next(it) : states_.erase(it);
  }
}

void Runner::transfer_fixated(const Signature& sig, const std::vector<double>& fitness,
                              const std::vector<Signature>& sigs,
                              std::optional<std::size_t> stale_slot) {
  // Best exemplar of the fixated shape, skipping the slot selection just
  // rewrote (its signature/fitness are one generation stale).
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    if (stale_slot && *stale_slot == i) continue;
    if (!(sigs[i] == sig)) continue;
    if (!best || fitness[i] > fitness[*best]) best = i;
  }
  if (!best) return;

  LtmEntry entry;
  entry.molecule = molecules_[*best];
  entry.signature = sig;
  entry.frozen = serialize_molecule(entry.molecule);
  entry.origin_generation = generation_;
  store_.add(std::move(entry));
  if (!first_fixation_) first_fixation_ = generation_;

  molecules_.erase(molecules_.begin() + static_cast<std::ptrdiff_t>(*best));

  Rng rng = make_rng(opts_.seed, kRefillStream, generation_);
  const ActorMolecule& src =
      molecules_.empty() ? store_.entries().back().molecule
                         : molecules_[std::uniform_int_distribution<std::size_t>(
                               0, molecules_.size() - 1)(rng)];
  ActorMolecule offspring = clone_molecule(src, ids_, minter_);
  copy_states_positional(src, offspring);
  if (!offspring.atoms.empty()) {
    const std::size_t k =
        std::uniform_int_distribution<std::size_t>(0, offspring.atoms.size() - 1)(rng);
    mutate_generic(offspring.atoms[k], offspring, pools_, minter_, rng);
    mutate_specific(offspring.atoms[k], rng, config_.evolve.param_sigma);
  }
  molecules_.push_back(std::move(offspring));
}

void Runner::assess_and_record() {
  std::vector<ActorMolecule> assessed = molecules_;
  for (const LtmEntry& entry : store_.entries()) assessed.push_back(entry.molecule);
  const AssessmentResult res =
      assess_fitness(assessed, games_, config_.engine, config_.env, states_, weights_,
                     opts_.seed, generation_, config_.jobs);
  const std::size_t pop_n = molecules_.size();
  last_fitness_.assign(res.actor_fitness.begin(),
                       res.actor_fitness.begin() + static_cast<std::ptrdiff_t>(pop_n));
  last_signatures_.assign(res.signatures.begin(),
                          res.signatures.begin() + static_cast<std::ptrdiff_t>(pop_n));
  for (std::size_t i = 0; i < assessed.size(); ++i) {
    metrics_ += std::to_string(generation_) + ",actor_molecule," +
                std::to_string(assessed[i].id()) + "," + fmt_double(res.actor_fitness[i]) +
                "," + std::to_string(res.actor_trials[i]) + "\n";
  }
  for (std::size_t g = 0; g < games_.size(); ++g) {
    metrics_ += std::to_string(generation_) + ",game," + std::to_string(games_[g].id) +
                "," + fmt_double(res.game_fitness[g]) + "," +
                std::to_string(res.game_samples[g]) + "\n";
  }
}

GenerationStats Runner::step_generation() {
  const std::size_t pop_n = molecules_.size();

  // Preserved designs stay runnable: they are assessed (and appear in trial
  // logs) right behind the population slice, but selection never sees them.
  std::vector<ActorMolecule> assessed = molecules_;
  for (const LtmEntry& entry : store_.entries()) assessed.push_back(entry.molecule);

  const AssessmentResult res =
      assess_fitness(assessed, games_, config_.engine, config_.env, states_, weights_,
                     opts_.seed, generation_, config_.jobs);

  last_fitness_.assign(res.actor_fitness.begin(),
                       res.actor_fitness.begin() + static_cast<std::ptrdiff_t>(pop_n));
  last_signatures_.assign(res.signatures.begin(),
                          res.signatures.begin() + static_cast<std::ptrdiff_t>(pop_n));

  if (lambda_pending_) {
    const auto [lo, hi] = std::minmax_element(last_fitness_.begin(), last_fitness_.end());
    lambda_ = 0.5 * (*hi - *lo);
    lambda_pending_ = false;
  }

  for (std::size_t i = 0; i < assessed.size(); ++i) {
    metrics_ += std::to_string(generation_) + ",actor_molecule," +
                std::to_string(assessed[i].id()) + "," + fmt_double(res.actor_fitness[i]) +
                "," + std::to_string(res.actor_trials[i]) + "\n";
  }
  for (std::size_t g = 0; g < games_.size(); ++g) {
    metrics_ += std::to_string(generation_) + ",game," + std::to_string(games_[g].id) +
                "," + fmt_double(res.game_fitness[g]) + "," +
                std::to_string(res.game_samples[g]) + "\n";
  }

  if (opts_.trace_trials && !assessed.empty()) {
    // Re-run the plan's first trial with tracing on; same seed, same starting
    // state, so the record is exactly what assessment executed.
    TrialSpec spec;
    spec.molecule = &assessed[0];
    std::vector<Atom> observers;
    for (const Atom& game : games_) {
      if (game_observes(game, assessed[0])) observers.push_back(game);
    }
    spec.games = &observers;
    const std::vector<Id> elig = eligible_initiators(assessed[0]);
    spec.initiator = elig.empty() ? kNoInitiator : elig[0];
    spec.seed = derive_seed(opts_.seed, generation_, 0);
    spec.t_steps = config_.engine.t_steps;
    spec.trace = true;
    spec.states = &states_;
    spec.weights = &weights_;
    spec.env = config_.env;
    const TrialResult traced = run_trial(spec);
    for (const TraceRecord& rec : traced.trace) {
      nlohmann::json line = {{"generation", generation_},
                             {"step", rec.step},
                             {"key", rec.key},
                             {"value", value_json(rec.value)},
                             {"writer", rec.writer}};
      trace_ += line.dump() + "\n";
    }
  }

  for (std::size_t i = 0; i < res.trials.size(); ++i) {
    apply_path_reward(res.trials[i], res.trial_rewards[i], weights_, baselines_,
                      config_.engine.eta, config_.engine.baseline_beta);
  }
  states_ = res.folded_states;

  const std::optional<Signature> fixated = fixation_.observe(last_signatures_);

  // Games first, while their fitness row still lines up with the game list
  // (actor selection may append observer copies via duplication).
  if (games_.size() >= 2) {
    Rng game_rng = make_rng(opts_.seed, kGameStream, generation_);
    std::vector<std::string> rewire_pool;
    {
      std::set<std::string> keys;
      for (const ActorMolecule& mol : molecules_) {
        for (const std::string& k : written_keys(mol)) keys.insert(k);
      }
      rewire_pool.assign(keys.begin(), keys.end());
    }
    evolve_games(games_, res.game_fitness, config_.evolve, rewire_pool, ids_, minter_,
                 game_rng);
  }

  std::optional<std::size_t> stale_slot;
  if (pop_n >= 2) {
    std::vector<double> penalized(pop_n);
    for (std::size_t i = 0; i < pop_n; ++i) {
      penalized[i] = last_fitness_[i] - store_.penalty(last_signatures_[i], lambda_);
    }
    Rng sel_rng = make_rng(opts_.seed, kSelectionStream, generation_);
    const SelectionOutcome outcome = select_and_replace(
        molecules_, games_, penalized, config_.evolve, pools_, ids_, minter_, sel_rng);
    stale_slot = outcome.loser;
    if (!outcome.loser_protected) {
      copy_states_positional(molecules_[outcome.winner], molecules_[outcome.loser]);
    }
  }

  GenerationStats stats;
  stats.generation = generation_;
  stats.miswirings = res.miswirings;
  if (pop_n > 0) {
    stats.best_fitness = *std::max_element(last_fitness_.begin(), last_fitness_.end());
    double sum = 0.0;
    for (double f : last_fitness_) sum += f;
    stats.mean_fitness = sum / static_cast<double>(pop_n);
  }

  if (fixated && store_.max_similarity(*fixated) < 1.0) {
    transfer_fixated(*fixated, last_fitness_, last_signatures_, stale_slot);
    stats.transferred = store_.size() > 0 &&
                        store_.entries().back().origin_generation == generation_;
  }

  prune_states();
  stats.store_size = store_.size();
  stats.game_count = games_.size();
  history_.push_back(stats);
  ++generation_;
  return stats;
}

void Runner::run() {
  if (!opts_.out_dir.empty()) {
    std::filesystem::create_directories(opts_.out_dir);
    write_file("manifest.txt", manifest());
  }
  for (int g = 0; g < opts_.generations; ++g) {
    step_generation();
    if (!opts_.out_dir.empty() && opts_.snapshot_every > 0 &&
        generation_ % static_cast<std::uint64_t>(opts_.snapshot_every) == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "population_gen%06llu.jsonl",
                    static_cast<unsigned long long>(generation_));
      write_file(name, serialize_population(molecules_, games_));
    }
  }
  assess_and_record();
  if (!opts_.out_dir.empty()) write_outputs();
}

std::string Runner::manifest() const {
  std::string out;
  out += "format = coevo-run/1\n";
  out += "scenario = " + scenario_name_ + "\n";
  out += "seed = " + std::to_string(opts_.seed) + "\n";
  out += "generations = " + std::to_string(opts_.generations) + "\n";
  out += "snapshot_every = " + std::to_string(opts_.snapshot_every) + "\n";
  out += "\n" + dump_config(config_);
  return out;
}

void Runner::write_file(const std::string& name, const std::string& content) const {
  const std::filesystem::path path = std::filesystem::path(opts_.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
}

void Runner::write_outputs() const {
  if (opts_.out_dir.empty()) return;
  std::filesystem::create_directories(opts_.out_dir);
  write_file("manifest.txt", manifest());
  write_file("metrics.csv", metrics_);
  write_file("population_final.jsonl", serialize_population(molecules_, games_));
  write_file("ltm.jsonl", serialize_ltm(store_));
  if (opts_.trace_trials) write_file("trace.jsonl", trace_);
}

}  // namespace coevo
