#include <algorithm>
#include <cmath>
#include <vector>

#include "coevo/fisher.hpp"
#include "doctest.h"

using namespace coevo;

TEST_CASE("the selection-gain check is deterministic in its seed") {
  FisherCheckParams p;
  p.actors = 24;
  p.loci = 4;
  p.replicates = 20;
  p.seed = 7;
  FisherCheckReport a = run_fisher_check(p);
  FisherCheckReport b = run_fisher_check(p);
  CHECK(a.additive.predicted == b.additive.predicted);
  CHECK(a.additive.realized == b.additive.realized);
  CHECK(a.epistatic.predicted == b.epistatic.predicted);
  CHECK(a.epistatic.realized == b.epistatic.realized);
  CHECK(a.additive.mean_rel_error == b.additive.mean_rel_error);

  FisherCheckParams q = p;
  q.seed = 8;
  FisherCheckReport c = run_fisher_check(q);
  CHECK(a.additive.realized != c.additive.realized);
}

TEST_CASE("report vectors line up with the replicate count") {
  FisherCheckParams p;
  p.actors = 16;
  p.loci = 3;
  p.replicates = 12;
  FisherCheckReport r = run_fisher_check(p);
  for (const FisherCheckMode* mode : {&r.additive, &r.epistatic}) {
    CHECK(mode->predicted.size() == 12);
    CHECK(mode->realized.size() == 12);
    CHECK(mode->mean_rel_error >= 0.0);
    CHECK(mode->frac_over_25 >= 0.0);
    CHECK(mode->frac_over_25 <= 1.0);
    // Predictions are positive: variance over a positive mean.
    for (double v : mode->predicted) CHECK(v > 0.0);
  }
}

TEST_CASE("the predictor fits additive fitness and misses epistatic fitness") {
  // Small but not tiny: enough replicates for the ordering to be stable.
  FisherCheckParams p;
  p.actors = 48;
  p.loci = 6;
  p.replicates = 61;  // odd, so the median is one order statistic
  p.seed = 3;
  FisherCheckReport r = run_fisher_check(p);
  CHECK(r.additive.mean_rel_error < r.epistatic.mean_rel_error);
  CHECK(r.additive.median_rel_error < r.epistatic.median_rel_error);

  // The medians bracket the same story as the means.
  std::vector<double> add_err;
  for (std::size_t i = 0; i < r.additive.predicted.size(); ++i)
    add_err.push_back(std::abs(r.additive.realized[i] - r.additive.predicted[i]) /
                      r.additive.predicted[i]);
  std::nth_element(add_err.begin(), add_err.begin() + add_err.size() / 2, add_err.end());
  CHECK(r.additive.median_rel_error == doctest::Approx(add_err[add_err.size() / 2]));
}

TEST_CASE("degenerate parameters are rejected") {
  FisherCheckParams p;
  p.actors = 1;
  CHECK_THROWS(run_fisher_check(p));
  p = FisherCheckParams{};
  p.loci = 0;
  CHECK_THROWS(run_fisher_check(p));
  p = FisherCheckParams{};
  p.replicates = 0;
  CHECK_THROWS(run_fisher_check(p));
}
