#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coevo/molecule.hpp"

namespace coevo {

struct LtmParams {
  double theta_fix = 0.9;  // population share that counts as fixated
  int g_fix = 10;          // consecutive generations the share must hold
  double lambda = -1.0;    // penalty scale; negative requests auto-scaling
};

// A preserved design: the best exemplar of a fixated shape, kept executable
// but outside the reach of selection and mutation. `frozen` holds its
// serialized bytes and never changes for the rest of the run.
struct LtmEntry {
  ActorMolecule molecule;
  Signature signature;
  std::string frozen;
  std::uint64_t origin_generation = 0;
};

class LongTermStore {
 public:
  const std::vector<LtmEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // Throws DuplicateEntry when the store already holds this exact shape
  // (similarity 1.0); storing the same design twice would double its penalty
  // without preserving anything new.
  void add(LtmEntry entry);

  // Highest similarity between `sig` and any stored entry; 0 when empty.
  double max_similarity(const Signature& sig) const;

  // Diversity pressure: lambda * max_similarity. Subtracting it from raw
  // fitness pushes the population away from designs already preserved.
  double penalty(const Signature& sig, double lambda) const;

 private:
  std::vector<LtmEntry> entries_;
};

// Watches per-generation signature censuses for a shape holding at least
// theta_fix of the population g_fix generations in a row.
class FixationDetector {
 public:
  FixationDetector(double theta_fix, int g_fix) : theta_fix_(theta_fix), g_fix_(g_fix) {}

  // Feed one generation's signatures; returns the fixated shape the moment
  // its streak completes (and re-arms). A generation where no shape clears
  // the threshold — or a different shape leads — breaks the streak.
  std::optional<Signature> observe(const std::vector<Signature>& population);

  void reset() {
    current_.reset();
    streak_ = 0;
  }
  int streak() const { return streak_; }

 private:
  double theta_fix_;
  int g_fix_;
  std::optional<Signature> current_;
  int streak_ = 0;
};

}  // namespace coevo
