#include "coevo/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coevo/errors.hpp"
#include "coevo/rng.hpp"

namespace coevo {

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population variance (divisor n): the selection identity
//   mean-after-proportional-selection = mean + Var_n(f)/mean
// is exact with this divisor, so it is the right predictor to test against.
double var_n(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// Stochastic universal sampling: n offspring slots from one spin with n
// equally spaced pointers; realized counts differ from expectation by < 1.
std::vector<int> sus_counts(const std::vector<double>& fitness, int n, Rng& rng) {
  const double total = std::accumulate(fitness.begin(), fitness.end(), 0.0);
  const double step = total / n;
  std::uniform_real_distribution<double> u(0.0, step);
  double pointer = u(rng);
  std::vector<int> counts(fitness.size(), 0);
  double cum = 0.0;
  std::size_t i = 0;
  for (int k = 0; k < n; ++k) {
    const double target = pointer + k * step;
    while (cum + fitness[i] <= target && i + 1 < fitness.size()) {
      cum += fitness[i];
      ++i;
    }
    ++counts[i];
  }
  return counts;
}

struct Replicate {
  double predicted = 0.0;
  double realized = 0.0;
};

template <typename FitnessFn>
Replicate one_round(int actors, int loci, double sigma, FitnessFn&& f, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<std::vector<double>> pop(actors, std::vector<double>(loci));
  for (auto& g : pop) {
    for (double& x : g) x = std::exp(sigma * n01(rng));
  }

  std::vector<double> fit(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = f(pop[i]);
  const double mean0 = mean_of(fit);
  Replicate rep;
  rep.predicted = var_n(fit) / mean0;

  const std::vector<int> counts = sus_counts(fit, actors, rng);
  std::vector<std::size_t> pool;
  pool.reserve(static_cast<std::size_t>(actors));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int c = 0; c < counts[i]; ++c) pool.push_back(i);
  }
  std::shuffle(pool.begin(), pool.end(), rng);

  // Complementary pairs: each locus goes to one child, its partner to the
  // other, so per-pair fitness sums are conserved exactly when fitness is
  // additive. Free assortment per locus keeps loci unlinked.
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<double>> next;
  next.reserve(static_cast<std::size_t>(actors));
  for (std::size_t p = 0; p + 1 < pool.size(); p += 2) {
    const std::vector<double>& a = pop[pool[p]];
    const std::vector<double>& b = pop[pool[p + 1]];
    std::vector<double> c1(loci), c2(loci);
    for (int l = 0; l < loci; ++l) {
      if (coin(rng)) {
        c1[l] = a[l];
        c2[l] = b[l];
      } else {
        c1[l] = b[l];
        c2[l] = a[l];
      }
    }
    next.push_back(std::move(c1));
    next.push_back(std::move(c2));
  }

  std::vector<double> fit1(next.size());
  for (std::size_t i = 0; i < next.size(); ++i) fit1[i] = f(next[i]);
  rep.realized = mean_of(fit1) - mean0;
  return rep;
}

template <typename FitnessFn>
FisherCheckMode run_mode(const FisherCheckParams& p, std::uint64_t stream, FitnessFn&& f) {
  FisherCheckMode mode;
  std::vector<double> errors;
  for (int r = 0; r < p.replicates; ++r) {
    Rng rng = make_rng(p.seed, stream, static_cast<std::uint64_t>(r));
    const Replicate rep = one_round(p.actors, p.loci, p.locus_sigma, f, rng);
    mode.predicted.push_back(rep.predicted);
    mode.realized.push_back(rep.realized);
    const double err = rep.predicted <= 1e-15
                           ? (std::abs(rep.realized) <= 1e-12 ? 0.0 : 1e9)
                           : std::abs(rep.realized - rep.predicted) / rep.predicted;
    errors.push_back(err);
  }
  mode.mean_rel_error = mean_of(errors);
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  mode.median_rel_error =
      n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  mode.frac_over_25 =
      static_cast<double>(std::count_if(errors.begin(), errors.end(),
                                        [](double e) { return e > 0.25; })) /
      static_cast<double>(n);
  return mode;
}

}  // namespace

FisherCheckReport run_fisher_check(const FisherCheckParams& params) {
  if (params.actors < 2 || params.loci < 1 || params.replicates < 1) {
    throw ValidationFailure("fisher check needs actors >= 2, loci >= 1, replicates >= 1");
  }
  FisherCheckReport report;
  report.additive = run_mode(params, 0xADD, [](const std::vector<double>& g) {
    return std::accumulate(g.begin(), g.end(), 0.0);
  });
  report.epistatic = run_mode(params, 0xEB1, [](const std::vector<double>& g) {
    double prod = 1.0;
    for (double x : g) prod *= x;
    return prod;
  });
  return report;
}

}  // namespace coevo
