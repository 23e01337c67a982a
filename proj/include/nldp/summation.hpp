#pragma once

#include <cstddef>
#include <vector>

namespace nldp {

enum class SummationMode { Plain, Kahan, Pairwise };

// Deterministic accumulator: pair sums are reduced in a fixed traversal
// order, so results are reproducible run-to-run for a fixed config.
class Accumulator {
 public:
  explicit Accumulator(SummationMode mode = SummationMode::Kahan) : mode_(mode) {}

  void add(double x) {
    switch (mode_) {
      case SummationMode::Plain:
        sum_ += x;
        break;
      case SummationMode::Kahan: {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
        break;
      }
      case SummationMode::Pairwise:
        buf_.push_back(x);
        break;
    }
  }

  double value() const {
    if (mode_ != SummationMode::Pairwise) return sum_;
    return pairwise(buf_.data(), buf_.size());
  }

 private:
  static double pairwise(const double* p, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += p[i];
      return s;
    }
    const std::size_t half = n / 2;
    return pairwise(p, half) + pairwise(p + half, n - half);
  }

  SummationMode mode_;
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::vector<double> buf_;
};

}  // namespace nldp
