#include <vector>

#include "coevo/errors.hpp"
#include "coevo/ltm.hpp"
#include "coevo/serialize.hpp"
#include "doctest.h"

using namespace coevo;

namespace {

// Distinct hand-built signatures: same roles, different kind pairs.
Signature sig_of(AtomKind w, AtomKind r, int copies = 1) {
  Signature s;
  for (int i = 0; i < copies; ++i) s.triples.push_back({w, KeyRole::Internal, r});
  s.kind_counts = {{w, copies}, {r, copies}};
  return s;
}

LtmEntry entry_of(const Signature& sig, std::uint64_t gen) {
  LtmEntry e;
  Atom a;
  a.id = 1;
  a.kind = AtomKind::Accumulator;
  a.params = {0.5};
  a.inputs = {"sensor/elbow_angle"};
  a.outputs = {"wm/w", "wm/acc"};
  e.molecule.atoms.push_back(a);
  e.signature = sig;
  e.frozen = serialize_molecule(e.molecule);
  e.origin_generation = gen;
  return e;
}

}  // namespace

TEST_CASE("the store refuses exact duplicates and reports best similarity") {
  const Signature a = sig_of(AtomKind::Accumulator, AtomKind::MotorWriter);
  const Signature b = sig_of(AtomKind::SquaredError, AtomKind::MotorWriter);
  const Signature c = sig_of(AtomKind::ForwardModel, AtomKind::InverseModel);

  LongTermStore store;
  CHECK(store.max_similarity(a) == 0.0);  // empty store matches nothing

  store.add(entry_of(a, 3));
  CHECK(store.size() == 1);
  CHECK(store.max_similarity(a) == doctest::Approx(1.0));
  CHECK_THROWS_AS(store.add(entry_of(a, 9)), DuplicateEntry);
  CHECK(store.size() == 1);

  // b shares one endpoint kind with a; c shares none.
  store.add(entry_of(b, 5));
  const double sim_c = store.max_similarity(c);
  CHECK(sim_c == 0.0);
  const double sim_b_like = store.max_similarity(b);
  CHECK(sim_b_like == doctest::Approx(1.0));

  // max_similarity takes the best entry, not the first.
  Signature b_twin = sig_of(AtomKind::SquaredError, AtomKind::MotorWriter, 2);
  const double best = store.max_similarity(b_twin);
  CHECK(best > store.max_similarity(c));
  CHECK(best < 1.0);
  CHECK(best == doctest::Approx(0.5));  // {t} vs {t, t}
}

TEST_CASE("the diversity penalty scales best similarity by lambda") {
  const Signature a = sig_of(AtomKind::Accumulator, AtomKind::MotorWriter);
  LongTermStore store;
  CHECK(store.penalty(a, 0.7) == 0.0);  // empty store: no pressure

  store.add(entry_of(a, 1));
  CHECK(store.penalty(a, 0.7) == doctest::Approx(0.7));
  CHECK(store.penalty(a, 0.0) == 0.0);

  const Signature far = sig_of(AtomKind::ForwardModel, AtomKind::InverseModel);
  CHECK(store.penalty(far, 0.7) == 0.0);
}

TEST_CASE("fixation fires after an unbroken run of dominant generations") {
  const Signature a = sig_of(AtomKind::Accumulator, AtomKind::MotorWriter);
  const Signature b = sig_of(AtomKind::SquaredError, AtomKind::MotorWriter);

  // 3 of 4 molecules share shape a: share 0.75.
  const std::vector<Signature> mostly_a = {a, a, a, b};
  const std::vector<Signature> mostly_b = {b, b, b, a};
  const std::vector<Signature> split = {a, a, b, b};

  FixationDetector det(0.7, 3);
  CHECK_FALSE(det.observe(mostly_a).has_value());
  CHECK(det.streak() == 1);
  CHECK_FALSE(det.observe(mostly_a).has_value());
  CHECK(det.streak() == 2);
  auto hit = det.observe(mostly_a);
  REQUIRE(hit.has_value());
  CHECK(*hit == a);
  CHECK(det.streak() == 0);  // re-armed

  SUBCASE("a below-threshold census breaks the streak") {
    det.observe(mostly_a);
    det.observe(mostly_a);
    CHECK_FALSE(det.observe(split).has_value());
    CHECK(det.streak() == 0);
    // The count starts over from scratch.
    det.observe(mostly_a);
    det.observe(mostly_a);
    CHECK_FALSE(det.observe(split).has_value());
    CHECK_FALSE(det.observe(mostly_a).has_value());
  }

  SUBCASE("a leader change restarts the streak at one") {
    det.observe(mostly_a);
    det.observe(mostly_a);
    CHECK_FALSE(det.observe(mostly_b).has_value());
    CHECK(det.streak() == 1);  // b starts its own run
    CHECK_FALSE(det.observe(mostly_b).has_value());
    auto got = det.observe(mostly_b);
    REQUIRE(got.has_value());
    CHECK(*got == b);
  }

  SUBCASE("manual reset clears the streak") {
    det.observe(mostly_a);
    det.observe(mostly_a);
    det.reset();
    CHECK(det.streak() == 0);
    CHECK_FALSE(det.observe(mostly_a).has_value());
  }

  SUBCASE("an empty census both misses and breaks") {
    det.observe(mostly_a);
    CHECK_FALSE(det.observe({}).has_value());
    CHECK(det.streak() == 0);
  }
}

TEST_CASE("a unanimous population fixates at threshold one") {
  const Signature a = sig_of(AtomKind::Accumulator, AtomKind::MotorWriter);
  FixationDetector det(1.0, 2);
  CHECK_FALSE(det.observe({a, a, a}).has_value());
  CHECK(det.observe({a, a, a}).has_value());
}
