#pragma once

#include <cstddef>
#include <vector>

namespace coevo {

// Histogram (plug-in) mutual-information estimate in bits over a fixed
// bins x bins grid. Ranges are declared up front; out-of-range samples land
// in the end bins. Estimates are clamped into [0, log2(bins)].
class MiEstimator {
 public:
  MiEstimator(int bins, double x_lo, double x_hi, double y_lo, double y_hi);

  void add(double x, double y);
  void reset();
  std::size_t count() const { return total_; }
  int bins() const { return bins_; }

  // Requires at least two samples.
  double estimate_bits() const;

 private:
  int bin_of(double v, double lo, double hi) const;

  int bins_;
  double x_lo_, x_hi_, y_lo_, y_hi_;
  std::vector<std::size_t> joint_;  // bins_ * bins_, row-major (x, y)
  std::size_t total_ = 0;
};

// One-shot convenience over paired samples.
double mutual_information_bits(const std::vector<double>& xs, const std::vector<double>& ys,
                               int bins, double x_lo, double x_hi, double y_lo, double y_hi);

}  // namespace coevo
