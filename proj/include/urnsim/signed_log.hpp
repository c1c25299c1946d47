#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace urnsim {

// A real number stored as sign and log of magnitude, for quantities whose
// magnitudes overflow double long before their logs do.  Zero has sign 0 and
// log_abs -inf.
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLog zero() { return {}; }

  static SignedLog from_double(double v) {
    if (v == 0.0) return {};
    return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
  }

  static SignedLog make(int sign, double log_abs) {
    if (sign == 0) return {};
    return {sign, log_abs};
  }

  // may round to 0 or +/-inf when the magnitude leaves double range; that is
  // the caller's concern
  double to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
  }

  bool is_zero() const { return sign == 0; }

  SignedLog negated() const { return {-sign, log_abs}; }

  // multiply by a positive factor given as its log
  SignedLog scaled(double log_factor) const {
    if (sign == 0) return {};
    return {sign, log_abs + log_factor};
  }
};

// Exact-as-possible signed sum of sign-log terms.  Positive and negative
// terms are reduced separately by log-sum-exp, feeding magnitudes in
// ascending order into a compensated accumulator, and the two group totals
// are differenced once.  The one unavoidable cancellation, the final
// difference, is measured: cancellation_log() returns
// log(max |term|) - log |result|, +inf if the result is exactly zero.
class SignedLogSum {
 public:
  void add(const SignedLog& term) {
    if (term.sign == 0) return;
    (term.sign > 0 ? pos_ : neg_).push_back(term.log_abs);
    if (term.log_abs > max_log_) max_log_ = term.log_abs;
  }

  SignedLog result() const;

  double max_term_log() const { return max_log_; }

  double cancellation_log() const {
    const SignedLog r = result();
    if (r.sign == 0) return std::numeric_limits<double>::infinity();
    return max_log_ - r.log_abs;
  }

 private:
  static double log_sum_exp(std::vector<double> logs);

  std::vector<double> pos_;
  std::vector<double> neg_;
  double max_log_ = -std::numeric_limits<double>::infinity();
};

}  // namespace urnsim
