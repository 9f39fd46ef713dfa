#pragma once

#include <cstdint>
#include <vector>

namespace coevo {

// One-generation check of the selection-gain predictor Var(f)/mean(f):
// synthetic genomes, fitness-proportional selection (stochastic universal
// sampling), then free per-locus recombination in complementary pairs — no
// mutation. Additive fitness (sum of loci) satisfies the predictor's
// assumptions; the product-fitness control violates them.
struct FisherCheckParams {
  int actors = 64;
  int loci = 8;
  int replicates = 200;
  std::uint64_t seed = 1;
  double locus_sigma = 0.7;  // loci are exp(sigma * N(0,1)) — positive, skewed
};

struct FisherCheckMode {
  double mean_rel_error = 0.0;    // mean over replicates of |realized - predicted| / predicted
  double median_rel_error = 0.0;
  double frac_over_25 = 0.0;      // fraction of replicates with error > 0.25
  std::vector<double> predicted;  // per replicate
  std::vector<double> realized;
};

struct FisherCheckReport {
  FisherCheckMode additive;
  FisherCheckMode epistatic;  // fitness = product of loci
};

FisherCheckReport run_fisher_check(const FisherCheckParams& params);

}  // namespace coevo
