#include "coevo/molecule.hpp"

#include <algorithm>
#include <set>

#include "coevo/errors.hpp"

namespace coevo {

namespace {

// Multiset Jaccard over two sorted ranges: sum of min counts over sum of max
// counts, walked as a sorted merge.
template <typename It>
double sorted_jaccard(It a, It a_end, It b, It b_end) {
  if (a == a_end && b == b_end) return 1.0;
  std::size_t inter = 0, uni = 0;
  while (a != a_end && b != b_end) {
    if (*a < *b) {
      ++uni;
      ++a;
    } else if (*b < *a) {
      ++uni;
      ++b;
    } else {
      ++inter;
      ++uni;
      ++a;
      ++b;
    }
  }
  uni += std::distance(a, a_end) + std::distance(b, b_end);
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

Id ActorMolecule::id() const {
  Id best = 0;
  bool first = true;
  for (const Atom& a : atoms) {
    if (first || a.id < best) best = a.id;
    first = false;
  }
  return best;
}

void validate_molecule(const ActorMolecule& mol) {
  if (mol.atoms.empty()) throw ValidationFailure("molecule has no atoms");
  std::set<Id> ids;
  std::set<std::string> wakes;
  for (const Atom& a : mol.atoms) {
    if (is_game_kind(a.kind))
      throw ValidationFailure("molecule holds a game transform (atom " +
                              std::to_string(a.id) + ")");
    validate_atom(a);
    if (!ids.insert(a.id).second)
      throw ValidationFailure("duplicate atom id " + std::to_string(a.id));
    if (!wakes.insert(a.outputs[0]).second)
      throw ValidationFailure("two atoms share the wake key " + a.outputs[0]);
  }
}

void validate_game_atom(const Atom& game) {
  if (!is_game_kind(game.kind))
    throw ValidationFailure("atom " + std::to_string(game.id) +
                            " is not a game transform");
  validate_atom(game);
}

void validate_population(const std::vector<ActorMolecule>& molecules,
                         const std::vector<Atom>& games) {
  std::set<Id> ids;
  for (const ActorMolecule& mol : molecules) {
    validate_molecule(mol);
    for (const Atom& a : mol.atoms)
      if (!ids.insert(a.id).second)
        throw ValidationFailure("atom id " + std::to_string(a.id) +
                                " appears in two population members");
  }
  for (const Atom& g : games) {
    validate_game_atom(g);
    if (!ids.insert(g.id).second)
      throw ValidationFailure("atom id " + std::to_string(g.id) +
                              " appears in two population members");
  }
}

std::vector<std::string> written_keys(const ActorMolecule& mol) {
  std::set<std::string> keys;
  for (const Atom& a : mol.atoms) keys.insert(a.outputs.begin(), a.outputs.end());
  return {keys.begin(), keys.end()};
}

std::vector<std::string> internal_written_keys(const ActorMolecule& mol) {
  std::set<std::string> keys;
  for (const Atom& a : mol.atoms)
    for (const std::string& k : a.outputs)
      if (key_role(k) == KeyRole::Internal) keys.insert(k);
  return {keys.begin(), keys.end()};
}

std::vector<std::string> internal_keys(const ActorMolecule& mol) {
  std::set<std::string> keys;
  for (const Atom& a : mol.atoms) {
    for (const std::string& k : a.inputs)
      if (key_role(k) == KeyRole::Internal) keys.insert(k);
    for (const std::string& k : a.outputs)
      if (key_role(k) == KeyRole::Internal) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

void remap_keys(ActorMolecule& mol, const std::map<std::string, std::string>& table) {
  const auto apply = [&table](std::string& key) {
    auto it = table.find(key);
    if (it != table.end()) key = it->second;
  };
  for (Atom& a : mol.atoms) {
    for (std::string& k : a.inputs) apply(k);
    for (std::string& k : a.outputs) apply(k);
  }
}

Signature molecule_signature(const ActorMolecule& mol,
                             const std::vector<EdgeRecord>& edges) {
  std::map<Id, AtomKind> kinds;
  for (const Atom& a : mol.atoms) kinds.emplace(a.id, a.kind);

  Signature sig;
  for (const EdgeRecord& e : edges) {
    auto w = kinds.find(e.writer);
    auto r = kinds.find(e.reader);
    if (w == kinds.end() || r == kinds.end()) continue;
    sig.triples.push_back({w->second, key_role(e.key), r->second});
  }
  std::sort(sig.triples.begin(), sig.triples.end());

  std::map<AtomKind, int> counts;
  for (const Atom& a : mol.atoms) ++counts[a.kind];
  sig.kind_counts.assign(counts.begin(), counts.end());
  return sig;
}

double signature_similarity(const Signature& a, const Signature& b) {
  if (a.triples.empty() || b.triples.empty()) {
    // Expand (kind, count) into a flat sorted multiset walk.
    std::vector<AtomKind> ka, kb;
    for (const auto& [k, n] : a.kind_counts) ka.insert(ka.end(), n, k);
    for (const auto& [k, n] : b.kind_counts) kb.insert(kb.end(), n, k);
    return sorted_jaccard(ka.begin(), ka.end(), kb.begin(), kb.end());
  }
  return sorted_jaccard(a.triples.begin(), a.triples.end(), b.triples.begin(),
                        b.triples.end());
}

}  // namespace coevo
