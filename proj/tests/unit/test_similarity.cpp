#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "coevo/engine.hpp"
#include "coevo/evolution.hpp"
#include "coevo/molecule.hpp"
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

// Source -> filter -> motor chain whose realized edges are stable run to run.
ActorMolecule pipeline(int base, const std::string& tag) {
  ActorMolecule mol;
  const std::string w1 = "wm/" + tag + "w1";
  const std::string d1 = "wm/" + tag + "d1";
  const std::string w2 = "wm/" + tag + "w2";
  const std::string d2 = "wm/" + tag + "d2";
  mol.atoms.push_back(make(base, AtomKind::Accumulator, {1.0},
                           {"sensor/elbow_angle"}, {w1, d1}));
  mol.atoms.push_back(make(base + 1, AtomKind::Accumulator, {0.5}, {w1, d1},
                           {w2, d2}, ActivationKind::SignalTrue, 0));
  mol.atoms.push_back(make(base + 2, AtomKind::MotorWriter, {1.0}, {w2, d2},
                           {"wm/" + tag + "w3", "motor/elbow_vel"},
                           ActivationKind::SignalTrue, 0));
  return mol;
}

std::vector<EdgeRecord> realized_edges(const ActorMolecule& mol) {
  TrialSpec spec;
  spec.molecule = &mol;
  spec.seed = 5;
  spec.t_steps = 6;
  return run_trial(spec).extracted.edges;
}

}  // namespace

TEST_CASE("signatures describe realized shape, not key spellings") {
  ActorMolecule a = pipeline(1, "a");
  ActorMolecule b = pipeline(10, "b");  // same shape, different ids and keys
  Signature sa = molecule_signature(a, realized_edges(a));
  Signature sb = molecule_signature(b, realized_edges(b));

  CHECK(!sa.triples.empty());
  CHECK(sa == sb);
  CHECK(signature_similarity(sa, sb) == doctest::Approx(1.0));

  // Kind counts are the sorted multiset of atom kinds.
  REQUIRE(sa.kind_counts.size() == 2);
  CHECK(sa.kind_counts[0].first == AtomKind::MotorWriter);
  CHECK(sa.kind_counts[0].second == 1);
  CHECK(sa.kind_counts[1].first == AtomKind::Accumulator);
  CHECK(sa.kind_counts[1].second == 2);
}

TEST_CASE("signature similarity is reflexive, symmetric, and bounded") {
  ActorMolecule a = pipeline(1, "a");
  ActorMolecule c = pipeline(20, "c");
  c.atoms[1].kind = AtomKind::SquaredError;
  c.atoms[1].params = {1.0};
  c.atoms[1].inputs = {"wm/cw1", "wm/cd1", "sensor/elbow_angle"};

  Signature sa = molecule_signature(a, realized_edges(a));
  Signature sc = molecule_signature(c, realized_edges(c));

  CHECK(signature_similarity(sa, sa) == doctest::Approx(1.0));
  CHECK(signature_similarity(sc, sc) == doctest::Approx(1.0));
  const double ac = signature_similarity(sa, sc);
  CHECK(ac == signature_similarity(sc, sa));
  CHECK(ac >= 0.0);
  CHECK(ac < 1.0);  // different shapes must not look identical
}

TEST_CASE("rename invariance holds under a full key remap") {
  ActorMolecule a = pipeline(1, "a");
  Signature before = molecule_signature(a, realized_edges(a));

  std::map<std::string, std::string> table;
  int n = 0;
  for (const std::string& k : internal_keys(a)) table[k] = "wm/r" + std::to_string(n++);
  ActorMolecule renamed = a;
  remap_keys(renamed, table);
  Signature after = molecule_signature(renamed, realized_edges(renamed));

  CHECK(before == after);
  CHECK(signature_similarity(before, after) == doctest::Approx(1.0));
}

TEST_CASE("triple overlap follows the multiset jaccard rule") {
  // Hand-built signatures: {A, B} vs {B, C} share one of three distinct
  // elements -> 1/3.
  SigTriple t1{AtomKind::Accumulator, KeyRole::Internal, AtomKind::Accumulator};
  SigTriple t2{AtomKind::Accumulator, KeyRole::Internal, AtomKind::MotorWriter};
  SigTriple t3{AtomKind::SquaredError, KeyRole::Internal, AtomKind::MotorWriter};

  Signature x, y;
  x.triples = {t1, t2};
  y.triples = {t2, t3};
  std::sort(x.triples.begin(), x.triples.end());  // triples is a sorted multiset
  std::sort(y.triples.begin(), y.triples.end());
  CHECK(signature_similarity(x, y) == doctest::Approx(1.0 / 3.0));

  // Multiset counting: {t1, t1} vs {t1} -> |inter| 1, |union| 2.
  Signature u, v;
  u.triples = {t1, t1};
  v.triples = {t1};
  CHECK(signature_similarity(u, v) == doctest::Approx(0.5));
}

TEST_CASE("edge-free molecules compare by kind counts") {
  // A molecule whose SignalTrue chain never fires realizes no edges.
  ActorMolecule quiet;
  quiet.atoms.push_back(make(1, AtomKind::Accumulator, {0.5},
                             {"wm/never", "wm/qd"}, {"wm/qw", "wm/qs"},
                             ActivationKind::SignalTrue, 0));
  Signature sq = molecule_signature(quiet, {});
  CHECK(sq.triples.empty());
  CHECK(!sq.kind_counts.empty());

  ActorMolecule quiet2;
  quiet2.atoms.push_back(make(2, AtomKind::Accumulator, {0.1},
                              {"wm/never2", "wm/qd2"}, {"wm/qw2", "wm/qs2"},
                              ActivationKind::SignalTrue, 0));
  Signature sq2 = molecule_signature(quiet2, {});
  CHECK(signature_similarity(sq, sq2) == doctest::Approx(1.0));

  // Fallback also applies when only one side is edge-free.
  ActorMolecule a = pipeline(1, "a");
  Signature sa = molecule_signature(a, realized_edges(a));
  const double mixed = signature_similarity(sa, sq);
  CHECK(mixed > 0.0);   // both contain Accumulators
  CHECK(mixed < 1.0);   // kind multisets differ
  CHECK(mixed == signature_similarity(sq, sa));

  // Two empty signatures are identical by definition.
  Signature e1, e2;
  CHECK(signature_similarity(e1, e2) == doctest::Approx(1.0));
}
