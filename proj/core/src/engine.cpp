#include "coevo/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "coevo/atoms.hpp"
#include "coevo/errors.hpp"

namespace coevo {

namespace {

// Fixed stream tags so every random decision in a trial has its own
// deterministic substream of the trial seed.
constexpr std::uint64_t kEnvStream = 0x01;
constexpr std::uint64_t kBranchStream = 0x02;
constexpr std::uint64_t kAtomStepStream = 0x03;
constexpr std::uint64_t kAtomStateStream = 0x04;

}  // namespace

double path_weight(const PathWeights& weights, Id id) {
  auto it = weights.find(id);
  return it == weights.end() ? 1.0 : it->second;
}

std::vector<Id> eligible_initiators(const ActorMolecule& m) {
  std::vector<Id> out;
  for (const Atom& atom : m.atoms) {
    if (atom.activation.kind != ActivationKind::AlwaysOn) continue;
    bool grounded = !atom.inputs.empty();
    for (const std::string& key : atom.inputs) {
      if (!is_grounding_key(key)) {
        grounded = false;
        break;
      }
    }
    // Zero-input atoms are self-contained sources and may also start.
    if (atom.inputs.empty()) grounded = true;
    if (grounded) out.push_back(atom.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool game_observes(const Atom& game, const ActorMolecule& m) {
  std::set<std::string> written;
  for (const Atom& atom : m.atoms) {
    written.insert(atom.outputs.begin(), atom.outputs.end());
  }
  for (const std::string& key : game.inputs) {
    if (written.count(key)) return true;
  }
  return false;
}

Id sample_weighted(const std::vector<std::pair<Id, double>>& entries, Rng& rng) {
  double total = 0.0;
  for (const auto& [id, w] : entries) {
    if (w < 0.0) throw AllZeroWeights("negative weight for atom " + std::to_string(id));
    total += w;
  }
  if (entries.empty() || total <= 0.0) {
    throw AllZeroWeights("no positive weight among " + std::to_string(entries.size()) +
                         " entries");
  }
  std::uniform_real_distribution<double> dist(0.0, total);
  double x = dist(rng);
  double acc = 0.0;
  for (const auto& [id, w] : entries) {
    acc += w;
    if (x < acc) return id;
  }
  return entries.back().first;
}

TrialResult run_trial(const TrialSpec& spec) {
  if (spec.molecule == nullptr) throw ValidationFailure("run_trial: molecule is null");
  if (spec.t_steps <= 0) {
    throw EmptyTrial("t_steps must be positive, got " + std::to_string(spec.t_steps));
  }
  const ActorMolecule& mol = *spec.molecule;
  static const std::vector<Atom> kNoGames;
  const std::vector<Atom>& games = spec.games ? *spec.games : kNoGames;

  TrialResult result;
  result.extracted.id = mol.id();

  // Deterministic execution order: ascending atom id.
  std::vector<const Atom*> order;
  order.reserve(mol.atoms.size());
  for (const Atom& atom : mol.atoms) order.push_back(&atom);
  std::sort(order.begin(), order.end(),
            [](const Atom* a, const Atom* b) { return a->id < b->id; });
  std::vector<const Atom*> game_order;
  game_order.reserve(games.size());
  for (const Atom& g : games) game_order.push_back(&g);
  std::sort(game_order.begin(), game_order.end(),
            [](const Atom* a, const Atom* b) { return a->id < b->id; });

  // Initiator resolution.
  std::vector<Id> elig = eligible_initiators(mol);
  Id initiator = spec.initiator;
  if (initiator == 0) {
    initiator = elig.empty() ? kNoInitiator : elig.front();
  } else if (initiator != kNoInitiator &&
             std::find(elig.begin(), elig.end(), initiator) == elig.end()) {
    throw NoInitiator("atom " + std::to_string(initiator) + " cannot start a trial");
  }
  result.extracted.initiator = initiator;

  // Branch points: wake-gated atoms listening to the same key compete; one
  // winner is drawn per trial, the rest stay locked until the next trial.
  std::map<std::string, std::vector<const Atom*>> by_wake_key;
  for (const Atom* ap : order) {
    if (ap->activation.kind != ActivationKind::SignalTrue) continue;
    int idx = ap->activation.input_index;
    if (idx < 0 || idx >= static_cast<int>(ap->inputs.size())) continue;
    by_wake_key[ap->inputs[static_cast<std::size_t>(idx)]].push_back(ap);
  }
  std::set<Id> locked;
  Rng branch_rng = make_rng(derive_seed(spec.seed, kBranchStream));
  for (const auto& [key, members] : by_wake_key) {
    if (members.size() < 2) continue;
    std::vector<std::pair<Id, double>> entries;
    entries.reserve(members.size());
    double total = 0.0;
    for (const Atom* m : members) {
      double w = spec.weights ? path_weight(*spec.weights, m->id) : 1.0;
      entries.emplace_back(m->id, w);
      total += w;
    }
    if (total <= 0.0) {
      // Dead branch: reset to uniform rather than refusing to run.
      for (auto& e : entries) e.second = 1.0;
    }
    Id winner = sample_weighted(entries, branch_rng);
    result.branch_winners.emplace_back(key, winner);
    for (const Atom* m : members) {
      if (m->id != winner) locked.insert(m->id);
    }
  }
  std::sort(result.branch_winners.begin(), result.branch_winners.end());

  // Environment and per-atom randomness / state.
  ArmEnv env(spec.env);
  Rng env_rng = make_rng(derive_seed(spec.seed, kEnvStream));
  env.reset(env_rng);
  if (spec.object) env.set_object(*spec.object);
  if (spec.start_pose) env.set_pose(spec.start_pose->first, spec.start_pose->second);

  // Per-atom randomness is keyed by execution position, not atom id, so a
  // remapped duplicate (fresh ids, same relative order) replays its parent's
  // draws exactly and the two trial logs stay isomorphic.
  std::map<Id, Rng> step_rngs;
  AtomStates states;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Atom* ap = order[pos];
    step_rngs.emplace(ap->id, make_rng(derive_seed(spec.seed, pos, kAtomStepStream)));
    if (spec.states) {
      auto it = spec.states->find(ap->id);
      if (it != spec.states->end()) {
        states.emplace(ap->id, it->second);
        continue;
      }
    }
    states.emplace(ap->id, make_atom_state(*ap, derive_seed(spec.seed, pos, kAtomStateStream)));
  }
  std::map<Id, GameTrialState> game_states;
  for (const Atom* gp : game_order) game_states.emplace(gp->id, GameTrialState{});

  WorkingMemory wm;
  if (spec.trace) wm.enable_trace();
  wm.set_step(0);

  std::set<Id> active;
  if (initiator != kNoInitiator) active.insert(initiator);
  std::set<Id> stepped;
  std::set<EdgeRecord> edges;
  std::vector<EdgeRecord> pending;

  bool terminated = false;
  for (int step = 0; step < spec.t_steps && !terminated; ++step) {
    wm.set_step(step);
    sync_sensors(wm, env.read_sensors());

    for (const Atom* ap : order) {
      const Atom& atom = *ap;
      if (locked.count(atom.id)) continue;
      if (!active.count(atom.id)) {
        // Same-step wake: an atom earlier in id order can raise a signal its
        // successors see within the same step.
        if (atom.activation.kind == ActivationKind::SignalTrue &&
            check_activation(atom, wm)) {
          active.insert(atom.id);
        } else {
          continue;
        }
      }
      // Record which actor-written keys this step would consume; the edges
      // are committed only if the step actually fires.
      pending.clear();
      for (const std::string& key : data_inputs(atom)) {
        const WmEntry* entry = wm.find(key);
        if (entry != nullptr && entry->role == WriterRole::Actor) {
          pending.push_back(EdgeRecord{entry->writer, key, atom.id});
        }
      }
      StepEffect effect = step_atom(atom, states.at(atom.id), wm, step_rngs.at(atom.id));
      if (effect.miswired) {
        ++result.miswirings;
      } else {
        stepped.insert(atom.id);
        for (EdgeRecord& e : pending) edges.insert(std::move(e));
      }
      if (effect.terminate) {
        terminated = true;
        break;
      }
    }

    // Observers run after the actor pass so they see this step's writes.
    for (const Atom* gp : game_order) {
      game_observe_step(*gp, game_states.at(gp->id), wm);
    }

    result.steps = step + 1;
    if (!terminated) env.apply_motors(collect_motors(wm, &result.coercions));
  }
  result.terminated = terminated;

  result.extracted.atom_ids.assign(stepped.begin(), stepped.end());
  result.extracted.edges.assign(edges.begin(), edges.end());
  for (Id id : stepped) {
    auto it = states.find(id);
    if (it != states.end()) result.states.emplace(id, std::move(it->second));
  }
  for (const Atom* gp : game_order) {
    if (game_is_terminal(*gp)) {
      result.components[gp->id] = game_component(*gp, game_states.at(gp->id));
    }
  }
  if (spec.trace) result.trace = wm.trace();
  return result;
}

void apply_path_reward(const TrialResult& trial, double reward, PathWeights& weights,
                       PathBaselines& baselines, double eta, double beta) {
  for (const auto& [key, winner] : trial.branch_winners) {
    double base;
    auto it = baselines.ema.find(key);
    if (it == baselines.ema.end()) {
      base = reward;  // first sample defines the baseline: zero advantage
      baselines.ema.emplace(key, reward);
    } else {
      base = it->second;
      it->second = (1.0 - beta) * it->second + beta * reward;
    }
    double adv = std::clamp(reward - base, -1.0, 1.0);
    auto [wit, inserted] = weights.emplace(winner, 1.0);
    wit->second = std::max(0.0, wit->second + eta * adv * (1.0 - adv * wit->second));
  }
}

AssessmentResult assess_fitness(const std::vector<ActorMolecule>& molecules,
                                const std::vector<Atom>& games,
                                const EngineParams& eng, const EnvParams& env,
                                const AtomStates& states, const PathWeights& weights,
                                std::uint64_t master_seed, std::uint64_t generation,
                                int jobs) {
  const std::size_t m_count = molecules.size();
  const std::size_t g_count = games.size();

  // Static association: which games score which molecules.
  std::vector<std::vector<std::size_t>> assoc(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t g = 0; g < g_count; ++g) {
      if (game_observes(games[g], molecules[m])) assoc[m].push_back(g);
    }
  }
  // Per-molecule observer lists handed to trials (associated games only, so
  // relay observers never leak values into unrelated molecules' trials).
  std::vector<std::vector<Atom>> trial_games(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t g : assoc[m]) trial_games[m].push_back(games[g]);
  }

  struct PlanEntry {
    std::size_t molecule;
    Id initiator;
    std::uint64_t trial_idx;
  };
  std::vector<PlanEntry> plan;
  std::vector<std::vector<Id>> elig(m_count);
  for (std::size_t m = 0; m < m_count; ++m) elig[m] = eligible_initiators(molecules[m]);
  std::uint64_t trial_idx = 0;
  for (int round = 0; round < eng.k_min; ++round) {
    for (std::size_t m = 0; m < m_count; ++m) {
      if (elig[m].empty()) {
        plan.push_back({m, kNoInitiator, trial_idx++});
      } else {
        for (Id init : elig[m]) plan.push_back({m, init, trial_idx++});
      }
    }
  }

  AssessmentResult out;
  out.trials.resize(plan.size());
  out.trial_molecule.resize(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) out.trial_molecule[i] = plan[i].molecule;

  auto run_one = [&](std::size_t i) {
    const PlanEntry& entry = plan[i];
    TrialSpec spec;
    spec.molecule = &molecules[entry.molecule];
    spec.games = &trial_games[entry.molecule];
    spec.initiator = entry.initiator;
    spec.seed = derive_seed(master_seed, generation, entry.trial_idx);
    spec.t_steps = eng.t_steps;
    spec.states = &states;
    spec.weights = &weights;
    spec.env = env;
    out.trials[i] = run_trial(spec);
  };

  const int workers = std::max(1, jobs);
  if (workers == 1 || plan.size() <= 1) {
    for (std::size_t i = 0; i < plan.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= plan.size()) return;
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(plan.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Aggregation is identical regardless of worker count: everything below
  // walks the plan in its deterministic order.
  out.actor_fitness.assign(m_count, 0.0);
  out.actor_trials.assign(m_count, 0);
  out.signatures.resize(m_count);
  out.game_fitness.assign(g_count, 0.0);
  out.game_samples.assign(g_count, 0);
  out.trial_rewards.assign(plan.size(), 0.0);

  std::vector<std::set<EdgeRecord>> edge_union(m_count);
  // component_sums[m][g-slot] accumulates per-trial components.
  std::vector<std::map<std::size_t, double>> comp_sum(m_count);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const std::size_t m = plan[i].molecule;
    const TrialResult& trial = out.trials[i];
    ++out.actor_trials[m];
    out.miswirings += trial.miswirings;
    for (const EdgeRecord& e : trial.extracted.edges) edge_union[m].insert(e);
    double reward = 0.0;
    for (std::size_t g : assoc[m]) {
      auto it = trial.components.find(games[g].id);
      if (it == trial.components.end()) continue;  // relay observer: no component
      comp_sum[m][g] += it->second;
      reward += it->second;
    }
    out.trial_rewards[i] = reward;
    for (const auto& [id, st] : trial.states) {
      out.folded_states[id] = st;  // later plan entries overwrite earlier ones
    }
  }

  // F(a,g): mean per-trial component. Actor fitness sums it over associated
  // games; game fitness is the n-1 sample variance of it across actors.
  std::vector<std::vector<double>> per_game(g_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const std::vector<EdgeRecord> edges(edge_union[m].begin(), edge_union[m].end());
    out.signatures[m] = molecule_signature(molecules[m], edges);
    if (out.actor_trials[m] == 0) continue;
    for (const auto& [g, sum] : comp_sum[m]) {
      double f = sum / out.actor_trials[m];
      out.actor_fitness[m] += f;
      per_game[g].push_back(f);
    }
  }
  for (std::size_t g = 0; g < g_count; ++g) {
    const std::vector<double>& fs = per_game[g];
    out.game_samples[g] = static_cast<int>(fs.size());
    if (fs.size() < 2) continue;
    double mean = 0.0;
    for (double f : fs) mean += f;
    mean /= static_cast<double>(fs.size());
    double ss = 0.0;
    for (double f : fs) ss += (f - mean) * (f - mean);
    out.game_fitness[g] = ss / static_cast<double>(fs.size() - 1);
  }
  return out;
}

}  // namespace coevo
