#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/mutual_info.hpp"
#include "coevo/rng.hpp"
#include "doctest.h"

using namespace coevo;

namespace {

// Independent plug-in estimate from scratch: discretize with the same declared
// grid, then count joints in a map rather than a flat array.
double brute_force_bits(const std::vector<double>& xs, const std::vector<double>& ys,
                        int bins, double x_lo, double x_hi, double y_lo, double y_hi) {
  auto bucket = [bins](double v, double lo, double hi) {
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    if (b < 0) b = 0;
    if (b > bins - 1) b = bins - 1;
    return b;
  };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> mx, my;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int a = bucket(xs[i], x_lo, x_hi);
    const int b = bucket(ys[i], y_lo, y_hi);
    joint[{a, b}] += 1.0 / n;
    mx[a] += 1.0 / n;
    my[b] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [ab, p] : joint) mi += p * std::log2(p / (mx[ab.first] * my[ab.second]));
  return mi;
}

}  // namespace

TEST_CASE("identity over four equiprobable bins carries two bits") {
  MiEstimator est(4, 0.0, 4.0, 0.0, 4.0);
  for (int rep = 0; rep < 25; ++rep)
    for (int v = 0; v < 4; ++v) est.add(v + 0.5, v + 0.5);
  CHECK(est.count() == 100);
  CHECK(est.estimate_bits() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("independent uniform pairs carry no information") {
  // Exhaustive product grid: exactly independent by construction.
  MiEstimator est(4, 0.0, 4.0, 0.0, 4.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) est.add(a + 0.5, b + 0.5);
  CHECK(est.estimate_bits() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("estimator agrees with an independent reimplementation on noise") {
  Rng rng = make_rng(42);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.3);

  std::vector<double> xs, ys;
  for (int i = 0; i < 4000; ++i) {
    const double x = ux(rng);
    xs.push_back(x);
    ys.push_back(std::tanh(2.0 * x) + noise(rng));
  }
  for (int bins : {2, 3, 5, 8, 16}) {
    const double got = mutual_information_bits(xs, ys, bins, -1.0, 1.0, -1.5, 1.5);
    const double want = brute_force_bits(xs, ys, bins, -1.0, 1.0, -1.5, 1.5);
    // The reference is unclamped; clamp it the same way before comparing.
    const double clamped = std::min(std::max(want, 0.0), std::log2(double(bins)));
    CHECK(got == doctest::Approx(clamped).epsilon(1e-12));
  }
}

TEST_CASE("out-of-range samples land in the end bins") {
  MiEstimator est(2, 0.0, 1.0, 0.0, 1.0);
  // Everything far outside the grid: perfectly correlated extremes.
  for (int i = 0; i < 10; ++i) {
    est.add(-100.0, -100.0);
    est.add(+100.0, +100.0);
  }
  CHECK(est.estimate_bits() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimates are clamped into the representable range") {
  // Two samples in distinct diagonal cells: raw plug-in MI is 1 bit, and the
  // clamp cannot exceed log2(bins).
  MiEstimator est(2, 0.0, 1.0, 0.0, 1.0);
  est.add(0.1, 0.1);
  est.add(0.9, 0.9);
  const double e = est.estimate_bits();
  CHECK(e >= 0.0);
  CHECK(e <= std::log2(2.0));
  CHECK(e == doctest::Approx(1.0));
}

TEST_CASE("reset clears counts and short windows refuse to estimate") {
  MiEstimator est(4, 0.0, 1.0, 0.0, 1.0);
  CHECK_THROWS_AS(est.estimate_bits(), WindowTooShort);
  est.add(0.5, 0.5);
  CHECK_THROWS_AS(est.estimate_bits(), WindowTooShort);
  est.add(0.6, 0.6);
  CHECK_NOTHROW(est.estimate_bits());
  est.reset();
  CHECK(est.count() == 0);
  CHECK_THROWS_AS(est.estimate_bits(), WindowTooShort);
}

TEST_CASE("construction rejects unusable grids") {
  CHECK_THROWS_AS(MiEstimator(1, 0.0, 1.0, 0.0, 1.0), ValidationFailure);
  CHECK_THROWS_AS(MiEstimator(0, 0.0, 1.0, 0.0, 1.0), ValidationFailure);
  CHECK_THROWS_AS(MiEstimator(4, 1.0, 1.0, 0.0, 1.0), ValidationFailure);
  CHECK_THROWS_AS(MiEstimator(4, 0.0, 1.0, 2.0, 1.0), ValidationFailure);
  CHECK_THROWS_AS(mutual_information_bits({1.0, 2.0}, {1.0}, 4, 0.0, 1.0, 0.0, 1.0),
                  ArityMismatch);
}

TEST_CASE("one-shot helper matches the incremental estimator") {
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs, ys;
  MiEstimator est(6, 0.0, 1.0, 0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng), y = u(rng) < 0.5 ? x : u(rng);
    xs.push_back(x);
    ys.push_back(y);
    est.add(x, y);
  }
  CHECK(mutual_information_bits(xs, ys, 6, 0.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(est.estimate_bits()).epsilon(1e-15));
}
