#include "urnsim/tail_curve.hpp"

#include <algorithm>
#include <stdexcept>

namespace urnsim {

TailCurve::TailCurve(std::vector<TailPoint> points, CurveSource source)
    : points_(std::move(points)), source_(source) {
  if (points_.empty()) throw std::invalid_argument("tail curve needs points");
  if (!(points_.front().prob <= 1.0))
    throw std::invalid_argument("tail probability exceeds 1 at the left edge");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.omega > 0.0))
      throw std::invalid_argument("tail curve omega values must be positive");
    if (i > 0) {
      if (!(p.omega > points_[i - 1].omega))
        throw std::invalid_argument("tail curve omega values must increase");
      if (p.prob > points_[i - 1].prob)
        throw std::invalid_argument("tail probabilities must not increase");
    }
    if (source_ == CurveSource::Empirical && !(p.prob > 0.0))
      throw std::invalid_argument(
          "empirical tails only carry achieved values, prob must be > 0");
  }
}

double TailCurve::value_at(double omega) const {
  if (omega < points_.front().omega)
    throw std::domain_error("query left of the tail curve's first point");
  // last point with point.omega <= omega
  auto it = std::upper_bound(
      points_.begin(), points_.end(), omega,
      [](double q, const TailPoint& p) { return q < p.omega; });
  return std::prev(it)->prob;
}

}  // namespace urnsim
