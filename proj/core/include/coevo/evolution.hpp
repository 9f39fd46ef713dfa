#pragma once

#include <utility>
#include <vector>

#include "coevo/molecule.hpp"

namespace coevo {

struct EvolutionParams {
  double rate_a = 0.3;          // per-atom bypass-replication rate (offspring only)
  double rate_m = 0.05;         // whole-molecule duplication rate
  double crossover_rate = 0.1;  // atom-level recombination rate (offspring only)
  double game_rate = 0.3;       // probability the game offspring is mutated
  double param_sigma = 0.05;    // weight-noise std for parametric mutation
};

// Monotone id source shared by every operator so atom ids stay unique across
// the whole population for the lifetime of a run.
class IdAllocator {
 public:
  explicit IdAllocator(Id next = 1) : next_(next) {}
  Id next() { return next_++; }
  void bump_past(Id id) {
    if (id >= next_) next_ = id + 1;
  }
  Id peek() const { return next_; }

 private:
  Id next_;
};

// Grounded keys the mutation operators may wire against.
struct KeyPools {
  std::vector<std::string> sensors;
  std::vector<std::string> motors;
};

// One multiplicative-bounded competition step: for every path i,
//   w_i <- max(0, w_i + eta * r_i * (1 - r_i * w_i)).
// Rewards in [-1, 1] keep weights bounded; zero reward leaves a path alone.
// Throws AllZeroWeights when the incoming weights carry no mass (callers
// reset such branches to uniform) and ValidationFailure on a size mismatch.
std::vector<double> path_compete_update(const std::vector<double>& weights,
                                        const std::vector<double>& rewards, double eta);

// Plain replication: fresh atom ids (relative order kept), wake-signal keys
// freshly minted (listeners follow), data keys shared with the parent,
// protection flags dropped.
ActorMolecule clone_molecule(const ActorMolecule& mol, IdAllocator& ids,
                             KeyMinter& minter);

// Full duplication: every internal wm key is remapped through one fresh
// bijection, so the copy is a disjoint subgraph sharing only sensor and motor
// registers with its parent. Games observing a remapped key are copied too
// (inputs remapped, fresh ids, relay outputs freshly minted) so the copy is
// scored the way the original was.
struct DuplicationResult {
  ActorMolecule molecule;
  std::vector<Atom> game_copies;
};
DuplicationResult duplicate_molecule_M(const ActorMolecule& mol,
                                       const std::vector<Atom>& games, IdAllocator& ids,
                                       KeyMinter& minter);

// Bypass replication of one atom: same inputs, every output freshly minted,
// fresh id, then one structural and one parametric mutation. The copy taps
// the same sources as the original but writes where nobody listens yet.
Atom replicate_atom_A(const Atom& atom, const ActorMolecule& mol, const KeyPools& pools,
                      IdAllocator& ids, KeyMinter& minter, Rng& rng, double param_sigma);

// One draw from the six-way structural menu (rewire/add/drop x input/output);
// inapplicable picks rotate to the next applicable op. Inputs rewire against
// sensors, motors, and the molecule's own internal keys; outputs rewire
// against motors and fresh mints (the wake slot only ever gets fresh mints).
void mutate_generic(Atom& atom, const ActorMolecule& mol, const KeyPools& pools,
                    KeyMinter& minter, Rng& rng);

// Kind-specific parameter jitter (weight noise, probability nudges, sign and
// mode flips) that keeps the atom valid for its kind.
void mutate_specific(Atom& atom, Rng& rng, double sigma);

// Recombination at atom granularity: computation (kind, params, activation)
// from `a`, input wiring from `b` (truncated or padded to a's arity),
// outputs freshly minted, fresh id, no protection.
Atom cross_atoms(const Atom& a, const Atom& b, IdAllocator& ids, KeyMinter& minter);

// One binary-tournament replacement over the actor population:
//   offspring = duplicate (rate_m) or clone of the winner,
//   then per-atom bypass replication at rate_a,
//   then atom crossover with a random other molecule at crossover_rate;
//   the loser leaves — unless it carries protected atoms, in which case it is
//   pruned to its protected core, keeps its slot, and the offspring is
//   discarded. Population size never changes; the game list may grow when a
//   duplication copies observers.
struct SelectionOutcome {
  std::size_t winner = 0;
  std::size_t loser = 0;
  bool duplicated = false;
  int bypasses = 0;
  bool crossed = false;
  bool loser_protected = false;
};
SelectionOutcome select_and_replace(std::vector<ActorMolecule>& molecules,
                                    std::vector<Atom>& games,
                                    const std::vector<double>& fitness,
                                    const EvolutionParams& params, const KeyPools& pools,
                                    IdAllocator& ids, KeyMinter& minter, Rng& rng);

// Binary tournament over game atoms: the winner's copy (fresh id, unprotected,
// relay output freshly minted) replaces the loser, mutated with probability
// game_rate (polarity flip or observed-key rewire against `rewire_pool`).
// Protected losers stay and the offspring is discarded.
struct GameSelectionOutcome {
  std::size_t winner = 0;
  std::size_t loser = 0;
  bool mutated = false;
  bool loser_protected = false;
};
GameSelectionOutcome evolve_games(std::vector<Atom>& games,
                                  const std::vector<double>& fitness,
                                  const EvolutionParams& params,
                                  const std::vector<std::string>& rewire_pool,
                                  IdAllocator& ids, KeyMinter& minter, Rng& rng);

}  // namespace coevo
