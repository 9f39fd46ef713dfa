#include "coevo/evolution.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "coevo/atoms.hpp"
#include "coevo/errors.hpp"

namespace coevo {

namespace {

std::size_t pick_index(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

bool chance(double p, Rng& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(rng) < p;
}

double gauss(Rng& rng, double sigma) {
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

// Atoms are copied in ascending-id order so the copy preserves the parent's
// execution order under its fresh ids.
std::vector<const Atom*> id_sorted(const ActorMolecule& mol) {
  std::vector<const Atom*> order;
  order.reserve(mol.atoms.size());
  for (const Atom& atom : mol.atoms) order.push_back(&atom);
  std::sort(order.begin(), order.end(),
            [](const Atom* a, const Atom* b) { return a->id < b->id; });
  return order;
}

void apply_key_table(Atom& atom, const std::map<std::string, std::string>& table) {
  auto map_key = [&table](std::string& key) {
    auto it = table.find(key);
    if (it != table.end()) key = it->second;
  };
  for (std::string& key : atom.inputs) map_key(key);
  for (std::string& key : atom.outputs) map_key(key);
}

// Keeps a SignalTrue rule coherent after input edits: an out-of-range index
// re-points to slot zero; no inputs at all means nothing to listen to.
void fix_activation(Atom& atom) {
  if (atom.activation.kind != ActivationKind::SignalTrue) return;
  if (atom.inputs.empty()) {
    atom.activation = ActivationRule{};
    return;
  }
  if (atom.activation.input_index < 0 ||
      atom.activation.input_index >= static_cast<int>(atom.inputs.size())) {
    atom.activation.input_index = 0;
  }
}

// FFN params are [hidden, w1(hidden x n_in), b1, w2, b2]; growing or
// shrinking the input layer edits w1 column-wise and leaves the rest alone.
void ffn_insert_input_column(Atom& atom, std::size_t col) {
  const int hidden = static_cast<int>(atom.params[0]);
  const std::size_t n_in = data_inputs(atom).size();  // already grown by caller
  const std::size_t old_in = n_in - 1;
  std::vector<double> grown;
  grown.reserve(atom.params.size() + static_cast<std::size_t>(hidden));
  grown.push_back(atom.params[0]);
  const double* w1 = atom.params.data() + 1;
  for (int j = 0; j < hidden; ++j) {
    for (std::size_t i = 0; i <= old_in; ++i) {
      if (i == col) grown.push_back(0.0);
      if (i < old_in) grown.push_back(w1[static_cast<std::size_t>(j) * old_in + i]);
    }
  }
  grown.insert(grown.end(), atom.params.begin() + 1 + hidden * static_cast<int>(old_in),
               atom.params.end());
  atom.params = std::move(grown);
}

void ffn_erase_input_column(Atom& atom, std::size_t col) {
  const int hidden = static_cast<int>(atom.params[0]);
  const std::size_t old_in = data_inputs(atom).size() + 1;  // caller already shrank
  std::vector<double> shrunk;
  shrunk.reserve(atom.params.size() - static_cast<std::size_t>(hidden));
  shrunk.push_back(atom.params[0]);
  const double* w1 = atom.params.data() + 1;
  for (int j = 0; j < hidden; ++j) {
    for (std::size_t i = 0; i < old_in; ++i) {
      if (i == col) continue;
      shrunk.push_back(w1[static_cast<std::size_t>(j) * old_in + i]);
    }
  }
  shrunk.insert(shrunk.end(), atom.params.begin() + 1 + hidden * static_cast<int>(old_in),
                atom.params.end());
  atom.params = std::move(shrunk);
}

}  // namespace

std::vector<double> path_compete_update(const std::vector<double>& weights,
                                        const std::vector<double>& rewards, double eta) {
  if (weights.size() != rewards.size()) {
    throw ValidationFailure("path_compete_update: " + std::to_string(weights.size()) +
                            " weights vs " + std::to_string(rewards.size()) + " rewards");
  }
  double mass = 0.0;
  for (double w : weights) mass += w;
  if (weights.empty() || mass <= 0.0) {
    throw AllZeroWeights("competition weights carry no mass");
  }
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double r = rewards[i];
    out[i] = std::max(0.0, weights[i] + eta * r * (1.0 - r * weights[i]));
  }
  return out;
}

ActorMolecule clone_molecule(const ActorMolecule& mol, IdAllocator& ids,
                             KeyMinter& minter) {
  std::map<std::string, std::string> wake_table;
  for (const Atom& atom : mol.atoms) {
    if (!atom.outputs.empty() && !is_game_kind(atom.kind)) {
      wake_table.emplace(atom.outputs[0], minter.mint());
    }
  }
  ActorMolecule copy;
  copy.atoms.reserve(mol.atoms.size());
  for (const Atom* ap : id_sorted(mol)) {
    Atom atom = *ap;
    atom.id = ids.next();
    atom.reflex = false;
    apply_key_table(atom, wake_table);
    copy.atoms.push_back(std::move(atom));
  }
  return copy;
}

DuplicationResult duplicate_molecule_M(const ActorMolecule& mol,
                                       const std::vector<Atom>& games, IdAllocator& ids,
                                       KeyMinter& minter) {
  std::map<std::string, std::string> table;
  for (const std::string& key : internal_keys(mol)) table.emplace(key, minter.mint());

  DuplicationResult out;
  out.molecule.atoms.reserve(mol.atoms.size());
  for (const Atom* ap : id_sorted(mol)) {
    Atom atom = *ap;
    atom.id = ids.next();
    atom.reflex = false;
    apply_key_table(atom, table);
    out.molecule.atoms.push_back(std::move(atom));
  }
  for (const Atom& game : games) {
    bool observes_copy = false;
    for (const std::string& key : game.inputs) {
      if (table.count(key)) {
        observes_copy = true;
        break;
      }
    }
    if (!observes_copy) continue;
    Atom copy = game;
    copy.id = ids.next();
    copy.reflex = false;
    apply_key_table(copy, table);
    for (std::string& out_key : copy.outputs) out_key = minter.mint();
    out.game_copies.push_back(std::move(copy));
  }
  return out;
}

void mutate_generic(Atom& atom, const ActorMolecule& mol, const KeyPools& pools,
                    KeyMinter& minter, Rng& rng) {
  enum Op { kRewireIn, kAddIn, kDropIn, kRewireOut, kAddOut, kDropOut, kOpCount };

  std::vector<std::string> in_pool = pools.sensors;
  in_pool.insert(in_pool.end(), pools.motors.begin(), pools.motors.end());
  for (const std::string& key : internal_written_keys(mol)) in_pool.push_back(key);

  const std::size_t data_in = data_inputs(atom).size();
  const std::size_t data_out = atom.outputs.empty() ? 0 : atom.outputs.size() - 1;
  const KindInfo& info = kind_info(atom.kind);
  auto applicable = [&](int op) {
    switch (op) {
      case kRewireIn:
        return !atom.inputs.empty() && !in_pool.empty();
      case kAddIn:
        return atom.kind == AtomKind::FeedForwardNet &&
               static_cast<int>(data_in) < info.data_in_max && !in_pool.empty();
      case kDropIn:
        return atom.kind == AtomKind::FeedForwardNet &&
               static_cast<int>(data_in) > info.data_in_min;
      case kRewireOut:
        return !atom.outputs.empty();
      case kAddOut:
        return atom.kind == AtomKind::MotorWriter;
      case kDropOut:
        return atom.kind == AtomKind::MotorWriter && data_out > 1;
      default:
        return false;
    }
  };

  int op = static_cast<int>(pick_index(kOpCount, rng));
  for (int tried = 0; tried < kOpCount && !applicable(op); ++tried) op = (op + 1) % kOpCount;
  if (!applicable(op)) return;  // fully wired-down atom: nothing structural to do

  auto pick_output_key = [&]() {
    // Motors or a fresh internal key, each register equally likely.
    std::size_t roll = pick_index(pools.motors.size() + 1, rng);
    return roll < pools.motors.size() ? pools.motors[roll] : minter.mint();
  };

  switch (op) {
    case kRewireIn: {
      const std::size_t slot = pick_index(atom.inputs.size(), rng);
      atom.inputs[slot] = in_pool[pick_index(in_pool.size(), rng)];
      break;
    }
    case kAddIn: {
      atom.inputs.push_back(in_pool[pick_index(in_pool.size(), rng)]);
      ffn_insert_input_column(atom, data_in);  // new column at the end
      break;
    }
    case kDropIn: {
      const std::size_t data_slot = pick_index(data_in, rng);
      // Translate the data position into the overall slot, skipping the
      // activation-signal slot if one is interleaved.
      const int sig = atom.activation.kind == ActivationKind::SignalTrue
                          ? atom.activation.input_index
                          : -1;
      std::size_t overall = 0, seen = 0;
      for (; overall < atom.inputs.size(); ++overall) {
        if (static_cast<int>(overall) == sig) continue;
        if (seen == data_slot) break;
        ++seen;
      }
      atom.inputs.erase(atom.inputs.begin() + static_cast<std::ptrdiff_t>(overall));
      if (sig >= 0 && static_cast<int>(overall) < sig) --atom.activation.input_index;
      ffn_erase_input_column(atom, data_slot);
      break;
    }
    case kRewireOut: {
      const std::size_t slot = pick_index(atom.outputs.size(), rng);
      // The wake slot must stay a private internal key; data slots may also
      // point at motor registers.
      atom.outputs[slot] = slot == 0 ? minter.mint() : pick_output_key();
      break;
    }
    case kAddOut:
      atom.outputs.push_back(pick_output_key());
      break;
    case kDropOut: {
      const std::size_t slot = 1 + pick_index(data_out, rng);
      atom.outputs.erase(atom.outputs.begin() + static_cast<std::ptrdiff_t>(slot));
      break;
    }
    default:
      break;
  }
  fix_activation(atom);
}

void mutate_specific(Atom& atom, Rng& rng, double sigma) {
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  switch (atom.kind) {
    case AtomKind::ForwardModel:
      // Validation demands a strictly positive rate; floor, don't zero.
      atom.params[0] = std::max(1e-6, atom.params[0] + gauss(rng, sigma));
      break;
    case AtomKind::SquaredError:
      atom.params[0] = atom.params[0] >= 0.5 ? 0.0 : 1.0;
      break;
    case AtomKind::StochasticHillClimber:
      switch (pick_index(3, rng)) {
        case 0:
          atom.params[1] = std::max(0.0, atom.params[1] + gauss(rng, sigma));
          break;
        case 1:
          atom.params[2] = clamp01(atom.params[2] + gauss(rng, sigma));
          break;
        default:
          atom.params[3] = -atom.params[3];
          break;
      }
      break;
    case AtomKind::MotorWriter:
      atom.params[0] += gauss(rng, sigma);
      break;
    case AtomKind::InverseModel:
    case AtomKind::FeedForwardNet:
      for (std::size_t i = 1; i < atom.params.size(); ++i) {
        atom.params[i] += gauss(rng, sigma);
      }
      break;
    case AtomKind::MutualInfo: {
      // Shift one axis's histogram range; a common offset keeps it ordered.
      const double d = gauss(rng, sigma);
      if (chance(0.5, rng)) {
        atom.params[2] += d;
        atom.params[3] += d;
      } else {
        atom.params[4] += d;
        atom.params[5] += d;
      }
      break;
    }
    case AtomKind::Accumulator:
      atom.params[0] = clamp01(atom.params[0] + gauss(rng, sigma));
      break;
    case AtomKind::Terminator:
      if (chance(0.5, rng)) {
        atom.params[0] += gauss(rng, sigma);
      } else {
        atom.params[1] = -atom.params[1];
      }
      break;
    default:
      // Game kinds carry only their polarity.
      atom.params[0] = -atom.params[0];
      break;
  }
}

Atom replicate_atom_A(const Atom& atom, const ActorMolecule& mol, const KeyPools& pools,
                      IdAllocator& ids, KeyMinter& minter, Rng& rng, double param_sigma) {
  Atom copy = atom;
  copy.id = ids.next();
  copy.reflex = false;
  for (std::string& key : copy.outputs) key = minter.mint();
  mutate_generic(copy, mol, pools, minter, rng);
  mutate_specific(copy, rng, param_sigma);
  return copy;
}

Atom cross_atoms(const Atom& a, const Atom& b, IdAllocator& ids, KeyMinter& minter) {
  Atom child = a;
  child.id = ids.next();
  child.reflex = false;
  std::vector<std::string> inputs = b.inputs;
  if (inputs.size() > a.inputs.size()) inputs.resize(a.inputs.size());
  while (inputs.size() < a.inputs.size()) inputs.push_back(a.inputs[inputs.size()]);
  child.inputs = std::move(inputs);
  for (std::string& key : child.outputs) key = minter.mint();
  fix_activation(child);
  return child;
}

SelectionOutcome select_and_replace(std::vector<ActorMolecule>& molecules,
                                    std::vector<Atom>& games,
                                    const std::vector<double>& fitness,
                                    const EvolutionParams& params, const KeyPools& pools,
                                    IdAllocator& ids, KeyMinter& minter, Rng& rng) {
  if (molecules.size() < 2) {
    throw ValidationFailure("selection needs at least two molecules");
  }
  if (fitness.size() != molecules.size()) {
    throw ValidationFailure("fitness entries do not match the population");
  }
  const std::size_t i = pick_index(molecules.size(), rng);
  std::size_t j = pick_index(molecules.size() - 1, rng);
  if (j >= i) ++j;

  SelectionOutcome out;
  const bool i_wins = fitness[i] != fitness[j]
                          ? fitness[i] > fitness[j]
                          : molecules[i].id() < molecules[j].id();
  out.winner = i_wins ? i : j;
  out.loser = i_wins ? j : i;

  ActorMolecule offspring;
  if (chance(params.rate_m, rng)) {
    DuplicationResult dup = duplicate_molecule_M(molecules[out.winner], games, ids, minter);
    offspring = std::move(dup.molecule);
    for (Atom& g : dup.game_copies) games.push_back(std::move(g));
    out.duplicated = true;
  } else {
    offspring = clone_molecule(molecules[out.winner], ids, minter);
  }

  const std::size_t base_atoms = offspring.atoms.size();
  for (std::size_t k = 0; k < base_atoms; ++k) {
    if (!chance(params.rate_a, rng)) continue;
    Atom source = offspring.atoms[k];
    offspring.atoms.push_back(replicate_atom_A(source, offspring, pools, ids, minter,
                                               rng, params.param_sigma));
    ++out.bypasses;
  }

  if (chance(params.crossover_rate, rng) && !offspring.atoms.empty()) {
    std::size_t other = pick_index(molecules.size() - 1, rng);
    if (other >= out.winner) ++other;
    const ActorMolecule& mate = molecules[other];
    if (!mate.atoms.empty()) {
      const std::size_t ai = pick_index(offspring.atoms.size(), rng);
      const std::size_t bi = pick_index(mate.atoms.size(), rng);
      offspring.atoms[ai] = cross_atoms(offspring.atoms[ai], mate.atoms[bi], ids, minter);
      out.crossed = true;
    }
  }

  ActorMolecule& loser = molecules[out.loser];
  const bool protected_loser =
      std::any_of(loser.atoms.begin(), loser.atoms.end(),
                  [](const Atom& a) { return a.reflex; });
  if (protected_loser) {
    // Protected atoms survive as a remnant in the loser's slot; the offspring
    // is dropped so the population size holds.
    std::erase_if(loser.atoms, [](const Atom& a) { return !a.reflex; });
    out.loser_protected = true;
  } else {
    loser = std::move(offspring);
  }
  return out;
}

GameSelectionOutcome evolve_games(std::vector<Atom>& games,
                                  const std::vector<double>& fitness,
                                  const EvolutionParams& params,
                                  const std::vector<std::string>& rewire_pool,
                                  IdAllocator& ids, KeyMinter& minter, Rng& rng) {
  GameSelectionOutcome out;
  if (games.size() < 2) return out;  // nothing to tournament
  if (fitness.size() != games.size()) {
    throw ValidationFailure("fitness entries do not match the game population");
  }
  const std::size_t i = pick_index(games.size(), rng);
  std::size_t j = pick_index(games.size() - 1, rng);
  if (j >= i) ++j;
  const bool i_wins =
      fitness[i] != fitness[j] ? fitness[i] > fitness[j] : games[i].id < games[j].id;
  out.winner = i_wins ? i : j;
  out.loser = i_wins ? j : i;

  Atom offspring = games[out.winner];
  offspring.id = ids.next();
  offspring.reflex = false;
  for (std::string& key : offspring.outputs) key = minter.mint();
  if (chance(params.game_rate, rng)) {
    out.mutated = true;
    if (!rewire_pool.empty() && chance(0.5, rng)) {
      const std::size_t slot = pick_index(offspring.inputs.size(), rng);
      offspring.inputs[slot] = rewire_pool[pick_index(rewire_pool.size(), rng)];
    } else {
      offspring.params[0] = -offspring.params[0];  // polarity flip
    }
  }

  if (games[out.loser].reflex) {
    out.loser_protected = true;  // innate observer stays; offspring dropped
  } else {
    games[out.loser] = std::move(offspring);
  }
  return out;
}

}  // namespace coevo
