#pragma once

#include <string>
#include <vector>

#include "coevo/ltm.hpp"
#include "coevo/molecule.hpp"

namespace coevo {

// Line-oriented JSON with sorted keys and shortest round-trip floats, so
// equal structures always serialize to identical bytes. Atom state is
// run-time only and never serialized.

std::string atom_to_json(const Atom& atom);
Atom atom_from_json(const std::string& text);  // throws ParseError

// One line per atom, ascending id.
std::string serialize_molecule(const ActorMolecule& mol);
ActorMolecule parse_molecule(const std::string& text);

// Snapshot of a whole population: a meta line, then every actor atom tagged
// with its molecule's id, then every game atom.
struct PopulationSnapshot {
  std::vector<ActorMolecule> molecules;
  std::vector<Atom> games;
};
std::string serialize_population(const std::vector<ActorMolecule>& molecules,
                                 const std::vector<Atom>& games);
PopulationSnapshot parse_population(const std::string& text);

// Preserved-design dump: per entry, a header line (origin generation and
// signature) followed by the entry's atom lines. Parsing rebuilds a store
// whose entries re-serialize to the same bytes.
std::string serialize_ltm(const LongTermStore& store);
LongTermStore parse_ltm(const std::string& text);

}  // namespace coevo
