#include "coevo/mutual_info.hpp"

#include <algorithm>
#include <cmath>

#include "coevo/errors.hpp"

namespace coevo {

MiEstimator::MiEstimator(int bins, double x_lo, double x_hi, double y_lo, double y_hi)
    : bins_(bins), x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {
  if (bins < 2) throw ValidationFailure("mutual-information histogram needs at least 2 bins");
  if (!(x_hi > x_lo) || !(y_hi > y_lo))
    throw ValidationFailure("mutual-information ranges must be non-degenerate");
  joint_.assign(static_cast<std::size_t>(bins_) * bins_, 0);
}

int MiEstimator::bin_of(double v, double lo, double hi) const {
  const double t = (v - lo) / (hi - lo);
  const int b = static_cast<int>(std::floor(t * bins_));
  return std::clamp(b, 0, bins_ - 1);
}

void MiEstimator::add(double x, double y) {
  const int bx = bin_of(x, x_lo_, x_hi_);
  const int by = bin_of(y, y_lo_, y_hi_);
  ++joint_[static_cast<std::size_t>(bx) * bins_ + by];
  ++total_;
}

void MiEstimator::reset() {
  std::fill(joint_.begin(), joint_.end(), 0);
  total_ = 0;
}

double MiEstimator::estimate_bits() const {
  if (total_ < 2) throw WindowTooShort("mutual-information estimate needs >= 2 samples");
  std::vector<double> px(bins_, 0.0), py(bins_, 0.0);
  const double n = static_cast<double>(total_);
  for (int i = 0; i < bins_; ++i)
    for (int j = 0; j < bins_; ++j) {
      const double c = static_cast<double>(joint_[static_cast<std::size_t>(i) * bins_ + j]);
      px[i] += c / n;
      py[j] += c / n;
    }
  double mi = 0.0;
  for (int i = 0; i < bins_; ++i)
    for (int j = 0; j < bins_; ++j) {
      const double pij = joint_[static_cast<std::size_t>(i) * bins_ + j] / n;
      if (pij > 0.0) mi += pij * std::log2(pij / (px[i] * py[j]));
    }
  return std::clamp(mi, 0.0, std::log2(static_cast<double>(bins_)));
}

double mutual_information_bits(const std::vector<double>& xs, const std::vector<double>& ys,
                               int bins, double x_lo, double x_hi, double y_lo, double y_hi) {
  if (xs.size() != ys.size()) throw ArityMismatch("paired samples must have equal length");
  MiEstimator est(bins, x_lo, x_hi, y_lo, y_hi);
  for (std::size_t i = 0; i < xs.size(); ++i) est.add(xs[i], ys[i]);
  return est.estimate_bits();
}

}  // namespace coevo
