#pragma once

#include <vector>

namespace urnsim {

enum class CurveSource { Empirical, Predicted };

struct TailPoint {
  double omega;
  double prob;
};

// Monotone nonincreasing map omega -> P(X >= omega), stored as step points at
// strictly increasing omega.  Empirical curves carry only achieved values, so
// every stored prob is > 0.  Predicted curves come from a truncated series
// and may dip below zero; they are stored as computed, never clamped.
class TailCurve {
 public:
  TailCurve(std::vector<TailPoint> points, CurveSource source);

  const std::vector<TailPoint>& points() const { return points_; }
  CurveSource source() const { return source_; }

  double first_omega() const { return points_.front().omega; }
  double last_omega() const { return points_.back().omega; }

  // right-continuous step lookup: the value at the largest stored omega not
  // exceeding the query, carried forward past the last point.  Queries left
  // of the first point are outside the curve's domain.
  double value_at(double omega) const;

 private:
  std::vector<TailPoint> points_;
  CurveSource source_;
};

}  // namespace urnsim
