#include "coevo/serialize.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

#include "coevo/atoms.hpp"
#include "coevo/errors.hpp"

namespace coevo {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string role_name(KeyRole role) {
  switch (role) {
    case KeyRole::Sensor:
      return "sensor";
    case KeyRole::Motor:
      return "motor";
    default:
      return "internal";
  }
}

KeyRole role_from_name(const std::string& name, int line) {
  if (name == "sensor") return KeyRole::Sensor;
  if (name == "motor") return KeyRole::Motor;
  if (name == "internal") return KeyRole::Internal;
  throw ParseError("unknown key role '" + name + "'", line);
}

json atom_obj(const Atom& atom) {
  json j;
  j["id"] = atom.id;
  j["kind"] = std::string(kind_name(atom.kind));
  j["params"] = atom.params;
  j["inputs"] = atom.inputs;
  j["outputs"] = atom.outputs;
  json act;
  act["rule"] =
      atom.activation.kind == ActivationKind::SignalTrue ? "signal_true" : "always_on";
  act["index"] = atom.activation.input_index;
  j["activation"] = act;
  j["reflex"] = atom.reflex;
  return j;
}

json parse_line(const std::string& line, int line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON", line_no);
  if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
  return j;
}

const json& field(const json& j, const char* name, int line_no) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw ParseError(std::string("missing field '") + name + "'", line_no);
  }
  return *it;
}

Atom atom_from_obj(const json& j, int line_no) {
  Atom atom;
  const json& id = field(j, "id", line_no);
  if (!id.is_number_integer()) throw ParseError("'id' must be an integer", line_no);
  atom.id = id.get<Id>();
  const json& kind = field(j, "kind", line_no);
  if (!kind.is_string()) throw ParseError("'kind' must be a string", line_no);
  try {
    atom.kind = kind_from_name(kind.get<std::string>());
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }
  const json& params = field(j, "params", line_no);
  const json& inputs = field(j, "inputs", line_no);
  const json& outputs = field(j, "outputs", line_no);
  if (!params.is_array() || !inputs.is_array() || !outputs.is_array()) {
    throw ParseError("'params', 'inputs', 'outputs' must be arrays", line_no);
  }
  try {
    atom.params = params.get<std::vector<double>>();
    atom.inputs = inputs.get<std::vector<std::string>>();
    atom.outputs = outputs.get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(e.what(), line_no);
  }
  const json& act = field(j, "activation", line_no);
  if (!act.is_object()) throw ParseError("'activation' must be an object", line_no);
  const json& rule = field(act, "rule", line_no);
  if (rule == "signal_true") {
    atom.activation.kind = ActivationKind::SignalTrue;
  } else if (rule == "always_on") {
    atom.activation.kind = ActivationKind::AlwaysOn;
  } else {
    throw ParseError("unknown activation rule", line_no);
  }
  const json& index = field(act, "index", line_no);
  if (!index.is_number_integer()) {
    throw ParseError("activation 'index' must be an integer", line_no);
  }
  atom.activation.input_index = index.get<int>();
  const json& reflex = field(j, "reflex", line_no);
  if (!reflex.is_boolean()) throw ParseError("'reflex' must be a boolean", line_no);
  atom.reflex = reflex.get<bool>();
  return atom;
}

json signature_obj(const Signature& sig) {
  json triples = json::array();
  for (const SigTriple& t : sig.triples) {
    triples.push_back({std::string(kind_name(t.writer_kind)), role_name(t.role),
                       std::string(kind_name(t.reader_kind))});
  }
  json kinds = json::array();
  for (const auto& [kind, count] : sig.kind_counts) {
    kinds.push_back({std::string(kind_name(kind)), count});
  }
  json j;
  j["triples"] = triples;
  j["kinds"] = kinds;
  return j;
}

Signature signature_from_obj(const json& j, int line_no) {
  Signature sig;
  const json& triples = field(j, "triples", line_no);
  const json& kinds = field(j, "kinds", line_no);
  if (!triples.is_array() || !kinds.is_array()) {
    throw ParseError("signature fields must be arrays", line_no);
  }
  try {
    for (const json& t : triples) {
      if (!t.is_array() || t.size() != 3) {
        throw ParseError("signature triple must have three elements", line_no);
      }
      sig.triples.push_back(SigTriple{kind_from_name(t[0].get<std::string>()),
                                      role_from_name(t[1].get<std::string>(), line_no),
                                      kind_from_name(t[2].get<std::string>())});
    }
    for (const json& k : kinds) {
      if (!k.is_array() || k.size() != 2) {
        throw ParseError("kind count must have two elements", line_no);
      }
      sig.kind_counts.emplace_back(kind_from_name(k[0].get<std::string>()),
                                   k[1].get<int>());
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what(), line_no);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }
  return sig;
}

void append_molecule_lines(std::string& out, const ActorMolecule& mol,
                           const char* section, const json& extra) {
  std::vector<const Atom*> order;
  order.reserve(mol.atoms.size());
  for (const Atom& atom : mol.atoms) order.push_back(&atom);
  std::sort(order.begin(), order.end(),
            [](const Atom* a, const Atom* b) { return a->id < b->id; });
  for (const Atom* atom : order) {
    json j = atom_obj(*atom);
    j["section"] = section;
    for (const auto& [key, value] : extra.items()) j[key] = value;
    out += j.dump();
    out += '\n';
  }
}

}  // namespace

std::string atom_to_json(const Atom& atom) { return atom_obj(atom).dump(); }

Atom atom_from_json(const std::string& text) {
  return atom_from_obj(parse_line(text, 1), 1);
}

std::string serialize_molecule(const ActorMolecule& mol) {
  std::string out;
  append_molecule_lines(out, mol, "actor", json::object());
  return out;
}

ActorMolecule parse_molecule(const std::string& text) {
  ActorMolecule mol;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    mol.atoms.push_back(atom_from_obj(parse_line(line, line_no), line_no));
  }
  if (mol.atoms.empty()) throw ParseError("no atoms in molecule text");
  return mol;
}

std::string serialize_population(const std::vector<ActorMolecule>& molecules,
                                 const std::vector<Atom>& games) {
  json meta;
  meta["format"] = "coevo-population";
  meta["section"] = "meta";
  meta["version"] = kFormatVersion;
  std::string out = meta.dump();
  out += '\n';
  for (const ActorMolecule& mol : molecules) {
    json extra;
    extra["molecule"] = mol.id();
    append_molecule_lines(out, mol, "actor", extra);
  }
  std::vector<const Atom*> game_order;
  game_order.reserve(games.size());
  for (const Atom& g : games) game_order.push_back(&g);
  std::sort(game_order.begin(), game_order.end(),
            [](const Atom* a, const Atom* b) { return a->id < b->id; });
  for (const Atom* g : game_order) {
    json j = atom_obj(*g);
    j["section"] = "game";
    out += j.dump();
    out += '\n';
  }
  return out;
}

PopulationSnapshot parse_population(const std::string& text) {
  PopulationSnapshot snap;
  std::map<Id, std::size_t> slot_by_molecule;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(line, line_no);
    const json& section = field(j, "section", line_no);
    if (section == "meta") {
      if (field(j, "format", line_no) != "coevo-population") {
        throw ParseError("unrecognized format tag", line_no);
      }
      if (field(j, "version", line_no).get<int>() != kFormatVersion) {
        throw ParseError("unsupported format version", line_no);
      }
      saw_meta = true;
    } else if (section == "actor") {
      const json& mol_tag = field(j, "molecule", line_no);
      if (!mol_tag.is_number_integer()) {
        throw ParseError("'molecule' must be an integer", line_no);
      }
      const Id mol_id = mol_tag.get<Id>();
      auto [it, fresh] = slot_by_molecule.emplace(mol_id, snap.molecules.size());
      if (fresh) snap.molecules.emplace_back();
      snap.molecules[it->second].atoms.push_back(atom_from_obj(j, line_no));
    } else if (section == "game") {
      snap.games.push_back(atom_from_obj(j, line_no));
    } else {
      throw ParseError("unknown section '" + section.get<std::string>() + "'", line_no);
    }
  }
  if (!saw_meta) throw ParseError("missing meta line");
  return snap;
}

std::string serialize_ltm(const LongTermStore& store) {
  std::string out;
  int entry_no = 0;
  for (const LtmEntry& entry : store.entries()) {
    json header;
    header["section"] = "ltm_header";
    header["entry"] = entry_no;
    header["origin_generation"] = entry.origin_generation;
    header["signature"] = signature_obj(entry.signature);
    out += header.dump();
    out += '\n';
    json extra;
    extra["entry"] = entry_no;
    append_molecule_lines(out, entry.molecule, "ltm_atom", extra);
    ++entry_no;
  }
  return out;
}

LongTermStore parse_ltm(const std::string& text) {
  struct Partial {
    LtmEntry entry;
    bool seen_header = false;
  };
  std::map<int, Partial> partials;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(line, line_no);
    const json& section = field(j, "section", line_no);
    const json& entry_tag = field(j, "entry", line_no);
    if (!entry_tag.is_number_integer()) {
      throw ParseError("'entry' must be an integer", line_no);
    }
    Partial& partial = partials[entry_tag.get<int>()];
    if (section == "ltm_header") {
      partial.entry.origin_generation =
          field(j, "origin_generation", line_no).get<std::uint64_t>();
      partial.entry.signature = signature_from_obj(field(j, "signature", line_no), line_no);
      partial.seen_header = true;
    } else if (section == "ltm_atom") {
      partial.entry.molecule.atoms.push_back(atom_from_obj(j, line_no));
    } else {
      throw ParseError("unknown section in store dump", line_no);
    }
  }
  LongTermStore store;
  for (auto& [entry_no, partial] : partials) {
    if (!partial.seen_header) {
      throw ParseError("entry " + std::to_string(entry_no) + " has no header");
    }
    if (partial.entry.molecule.atoms.empty()) {
      throw ParseError("entry " + std::to_string(entry_no) + " has no atoms");
    }
    partial.entry.frozen = serialize_molecule(partial.entry.molecule);
    store.add(std::move(partial.entry));
  }
  return store;
}

}  // namespace coevo
