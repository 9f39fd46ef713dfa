#include <string>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/ltm.hpp"
#include "coevo/scenario.hpp"
#include "coevo/serialize.hpp"
#include "doctest.h"

using namespace coevo;

namespace {

Atom make(Id id, AtomKind kind, std::vector<double> params,
          std::vector<std::string> inputs, std::vector<std::string> outputs,
          ActivationKind act = ActivationKind::AlwaysOn, int idx = -1) {
  Atom a;
  a.id = id;
  a.kind = kind;
  a.params = std::move(params);
  a.inputs = std::move(inputs);
  a.outputs = std::move(outputs);
  a.activation.kind = act;
  a.activation.input_index = idx;
  return a;
}

bool atoms_equal(const Atom& a, const Atom& b) {
  return a.id == b.id && a.kind == b.kind && a.params == b.params &&
         a.inputs == b.inputs && a.outputs == b.outputs &&
         a.activation.kind == b.activation.kind &&
         a.activation.input_index == b.activation.input_index && a.reflex == b.reflex;
}

}  // namespace

TEST_CASE("atom json round-trips every field byte-identically") {
  Atom a = make(42, AtomKind::StochasticHillClimber, {2.0, 0.125, 0.5, -1.0},
                {"wm/wake", "wm/reward"}, {"wm/next", "wm/cand"},
                ActivationKind::SignalTrue, 0);
  a.reflex = true;

  const std::string line = atom_to_json(a);
  Atom back = atom_from_json(line);
  CHECK(atoms_equal(a, back));
  CHECK(atom_to_json(back) == line);  // fixed key order: stable bytes

  // Shortest round-trip floats survive awkward values exactly.
  Atom f = make(7, AtomKind::Accumulator, {0.1}, {"sensor/elbow_angle"},
                {"wm/w", "wm/acc"});
  f.params[0] = 0.30000000000000004;
  Atom fb = atom_from_json(atom_to_json(f));
  CHECK(fb.params[0] == 0.30000000000000004);

  Atom g = make(8, AtomKind::AccumulateValue, {-1.0}, {"wm/acc"}, {});
  CHECK(atoms_equal(g, atom_from_json(atom_to_json(g))));
}

TEST_CASE("molecule serialization is one atom per line in ascending id order") {
  ActorMolecule mol;
  mol.atoms.push_back(make(9, AtomKind::MotorWriter, {1.5}, {"wm/w2", "wm/v"},
                           {"wm/w3", "motor/elbow_vel"}, ActivationKind::SignalTrue, 0));
  mol.atoms.push_back(make(3, AtomKind::Accumulator, {0.0}, {"sensor/elbow_angle"},
                           {"wm/w2", "wm/v"}));

  const std::string text = serialize_molecule(mol);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"id\":3") < text.find("\"id\":9"));

  ActorMolecule back = parse_molecule(text);
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.atoms[0].id == 3);
  CHECK(back.atoms[1].id == 9);
  CHECK(serialize_molecule(back) == text);
}

TEST_CASE("population snapshots round-trip molecules and games together") {
  Scenario sc = build_scenario("resistance", RunConfig{});
  const std::string text = serialize_population(sc.molecules, sc.games);

  PopulationSnapshot snap = parse_population(text);
  REQUIRE(snap.molecules.size() == sc.molecules.size());
  REQUIRE(snap.games.size() == sc.games.size());
  CHECK(serialize_population(snap.molecules, snap.games) == text);

  // Molecule membership is preserved exactly.
  for (std::size_t m = 0; m < sc.molecules.size(); ++m) {
    REQUIRE(snap.molecules[m].atoms.size() == sc.molecules[m].atoms.size());
    for (std::size_t i = 0; i < sc.molecules[m].atoms.size(); ++i)
      CHECK(atoms_equal(snap.molecules[m].atoms[i], sc.molecules[m].atoms[i]));
  }
  for (std::size_t i = 0; i < sc.games.size(); ++i)
    CHECK(atoms_equal(snap.games[i], sc.games[i]));
}

TEST_CASE("preserved-design dumps keep frozen bytes and origin generations") {
  Scenario sc = build_scenario("minimal", RunConfig{});
  LongTermStore store;
  LtmEntry e;
  e.molecule = sc.molecules[0];
  e.signature = molecule_signature(sc.molecules[0], {});
  e.frozen = serialize_molecule(sc.molecules[0]);
  e.origin_generation = 17;
  store.add(e);

  const std::string text = serialize_ltm(store);
  LongTermStore back = parse_ltm(text);
  REQUIRE(back.size() == 1);
  CHECK(back.entries()[0].origin_generation == 17);
  CHECK(back.entries()[0].frozen == e.frozen);
  CHECK(back.entries()[0].signature == e.signature);
  CHECK(serialize_ltm(back) == text);

  // An empty store is a valid (empty) document.
  LongTermStore empty;
  CHECK(serialize_ltm(empty).empty());
  CHECK(parse_ltm("").size() == 0);
}

TEST_CASE("parse failures carry one-based line numbers") {
  // Unparseable atom line.
  try {
    atom_from_json("{ not json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }

  // Valid first line, broken second line.
  ActorMolecule mol;
  mol.atoms.push_back(make(1, AtomKind::Accumulator, {0.5}, {"sensor/elbow_angle"},
                           {"wm/w", "wm/acc"}));
  std::string text = serialize_molecule(mol);
  text += "{\"bad\": true}\n";
  try {
    parse_molecule(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  // Unknown kind names are rejected, not mapped to something else.
  Atom a = make(1, AtomKind::Accumulator, {0.5}, {"sensor/elbow_angle"},
                {"wm/w", "wm/acc"});
  std::string line = atom_to_json(a);
  const std::string tagged = "\"kind\":\"Accumulator\"";
  const auto pos = line.find(tagged);
  REQUIRE(pos != std::string::npos);
  line.replace(pos, tagged.size(), "\"kind\":\"Nonsense\"");
  CHECK_THROWS_AS(atom_from_json(line), ParseError);
}
