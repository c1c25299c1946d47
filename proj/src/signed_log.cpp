#include "urnsim/signed_log.hpp"

#include <algorithm>

#include "urnsim/stable_sum.hpp"

namespace urnsim {

// log(sum exp(logs)): magnitudes ascend into a compensated accumulator so
// small terms are not swallowed before the large ones arrive
double SignedLogSum::log_sum_exp(std::vector<double> logs) {
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  std::sort(logs.begin(), logs.end());
  const double m = logs.back();
  if (std::isinf(m)) return m;
  StableSum s;
  for (double l : logs) s.add(std::exp(l - m));
  return m + std::log(s.get());
}

SignedLog SignedLogSum::result() const {
  const double lp = log_sum_exp(pos_);
  const double ln = log_sum_exp(neg_);
  const bool has_pos = !pos_.empty();
  const bool has_neg = !neg_.empty();
  if (!has_pos && !has_neg) return SignedLog::zero();
  if (!has_neg) return SignedLog::make(1, lp);
  if (!has_pos) return SignedLog::make(-1, ln);
  if (lp == ln) return SignedLog::zero();
  // |e^a - e^b| = e^max * (1 - e^-(max-min)), one log1p per difference
  const double hi = std::max(lp, ln);
  const double lo = std::min(lp, ln);
  const double log_abs = hi + std::log1p(-std::exp(lo - hi));
  return SignedLog::make(lp > ln ? 1 : -1, log_abs);
}

}  // namespace urnsim
