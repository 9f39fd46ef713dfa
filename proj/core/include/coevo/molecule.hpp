#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coevo/atoms.hpp"

namespace coevo {

// A disjoint cluster of actor atoms: the unit of selection. Clusters share
// only grounding (sensor/motor) registers — and, for plain-replication
// clones, data keys — with the rest of the population.
struct ActorMolecule {
  std::vector<Atom> atoms;

  // Stable identity: the smallest atom id (0 when empty).
  Id id() const;
};

void validate_molecule(const ActorMolecule& mol);
void validate_game_atom(const Atom& game);

// Whole-population check: atom ids unique across molecules and games.
void validate_population(const std::vector<ActorMolecule>& molecules,
                         const std::vector<Atom>& games);

// Key views over a molecule's declared wiring.
std::vector<std::string> written_keys(const ActorMolecule& mol);
std::vector<std::string> internal_written_keys(const ActorMolecule& mol);
// Every wm/ key the molecule mentions, inputs and outputs alike.
std::vector<std::string> internal_keys(const ActorMolecule& mol);

// Rewrites every input/output key through the table (absent keys unchanged).
void remap_keys(ActorMolecule& mol, const std::map<std::string, std::string>& table);

// --- trial extraction --------------------------------------------------------
// A realized data-flow event: while stepping, `reader` consumed `key` whose
// current value was written by actor atom `writer`. Activation-signal reads
// are not edges; neither are sensor reads (the env bridge is not an atom).
struct EdgeRecord {
  Id writer = 0;
  std::string key;
  Id reader = 0;
  auto operator<=>(const EdgeRecord&) const = default;
};

// What one trial revealed about a molecule: which atoms actually activated
// and which edges were realized.
struct ExtractedMolecule {
  Id id = 0;
  std::vector<Id> atom_ids;       // activated at least once, ascending
  std::vector<EdgeRecord> edges;  // distinct realized edges, sorted
  Id initiator = -1;              // -1: nothing self-started
};

// --- signatures ---------------------------------------------------------------
// Rename-invariant shape descriptor: the multiset of (writer kind, key role,
// reader kind) triples over realized edges. Molecules that realized no edges
// fall back to comparing their atom-kind multisets.
struct SigTriple {
  AtomKind writer_kind = AtomKind::Accumulator;
  KeyRole role = KeyRole::Internal;
  AtomKind reader_kind = AtomKind::Accumulator;
  auto operator<=>(const SigTriple&) const = default;
};

struct Signature {
  std::vector<SigTriple> triples;                     // sorted multiset
  std::vector<std::pair<AtomKind, int>> kind_counts;  // sorted (kind, count)
  bool operator==(const Signature&) const = default;
};

Signature molecule_signature(const ActorMolecule& mol,
                             const std::vector<EdgeRecord>& edges);

// Multiset Jaccard over triples; over kind counts when either edge set is
// empty. Two empty signatures compare as 1.0.
double signature_similarity(const Signature& a, const Signature& b);

}  // namespace coevo
