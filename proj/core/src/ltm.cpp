#include "coevo/ltm.hpp"

#include <algorithm>

#include "coevo/errors.hpp"

namespace coevo {

void LongTermStore::add(LtmEntry entry) {
  if (max_similarity(entry.signature) >= 1.0) {
    throw DuplicateEntry("store already holds a shape with similarity 1.0");
  }
  entries_.push_back(std::move(entry));
}

double LongTermStore::max_similarity(const Signature& sig) const {
  double best = 0.0;
  for (const LtmEntry& e : entries_) {
    best = std::max(best, signature_similarity(sig, e.signature));
  }
  return best;
}

double LongTermStore::penalty(const Signature& sig, double lambda) const {
  if (entries_.empty()) return 0.0;
  return lambda * max_similarity(sig);
}

std::optional<Signature> FixationDetector::observe(
    const std::vector<Signature>& population) {
  if (population.empty()) {
    reset();
    return std::nullopt;
  }
  // Census by exact signature equality; the leading group decides.
  const Signature* leader = nullptr;
  int leader_count = 0;
  std::vector<const Signature*> seen;
  for (const Signature& sig : population) {
    bool counted = false;
    for (const Signature* s : seen) {
      if (*s == sig) {
        counted = true;
        break;
      }
    }
    if (counted) continue;
    seen.push_back(&sig);
    int count = 0;
    for (const Signature& other : population) {
      if (sig == other) ++count;
    }
    if (count > leader_count) {
      leader = &sig;
      leader_count = count;
    }
  }
  const double share =
      static_cast<double>(leader_count) / static_cast<double>(population.size());
  if (leader == nullptr || share < theta_fix_) {
    reset();
    return std::nullopt;
  }
  if (current_ && *current_ == *leader) {
    ++streak_;
  } else {
    current_ = *leader;
    streak_ = 1;
  }
  if (streak_ < g_fix_) return std::nullopt;
  Signature fixed = *current_;
  reset();
  return fixed;
}

}  // namespace coevo
