#pragma once

#include <cmath>

namespace urnsim {

// Kahan-compensated accumulator.  Error stays O(eps * sum of magnitudes)
// independent of the number of addends.
class StableSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }

  double get() const { return sum_ + comp_; }

  void reset() { sum_ = comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace urnsim
