#include "urnsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urnsim/stable_sum.hpp"

namespace urnsim {

PowerLawFit fit_power_law_mle(std::span<const double> samples, double x_min) {
  if (!(x_min > 0.0) || !std::isfinite(x_min))
    throw std::invalid_argument("x_min must be positive and finite");

  const double log_x_min = std::log(x_min);
  StableSum log_sum;
  std::uint64_t n = 0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("samples must be finite");
    if (x < x_min) continue;
    log_sum.add(std::log(x) - log_x_min);
    ++n;
  }
  if (n < 2)
    throw std::invalid_argument("need at least two samples at or above x_min");
  if (!(log_sum.get() > 0.0))
    throw std::runtime_error(
        "all tail samples sit at x_min; the exponent is unidentifiable");

  PowerLawFit fit;
  fit.x_min = x_min;
  fit.n_tail = n;
  fit.beta = 1.0 + static_cast<double>(n) / log_sum.get();
  fit.std_err = (fit.beta - 1.0) / std::sqrt(static_cast<double>(n));
  return fit;
}

ExponentialFit fit_exponential(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("samples must be nonempty");
  StableSum sum;
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("samples must be positive and finite");
    sum.add(x);
  }
  ExponentialFit fit;
  fit.n = samples.size();
  fit.rate = static_cast<double>(samples.size()) / sum.get();
  return fit;
}

double tail_slope(const TailCurve& curve, double omega_lo, double omega_hi) {
  if (!(omega_lo > 0.0) || !(omega_hi >= omega_lo))
    throw std::invalid_argument("need 0 < omega_lo <= omega_hi");

  std::vector<double> xs, ys;
  for (const TailPoint& p : curve.points()) {
    if (p.omega < omega_lo || p.omega > omega_hi) continue;
    if (!(p.prob > 0.0)) continue;
    xs.push_back(std::log(p.omega));
    ys.push_back(std::log(p.prob));
  }
  if (xs.size() < 3)
    throw std::invalid_argument(
        "need at least three positive curve points inside the window");

  StableSum sx, sy;
  for (double x : xs) sx.add(x);
  for (double y : ys) sy.add(y);
  const double mx = sx.get() / static_cast<double>(xs.size());
  const double my = sy.get() / static_cast<double>(ys.size());

  StableSum sxy, sxx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy.add((xs[i] - mx) * (ys[i] - my));
    sxx.add((xs[i] - mx) * (xs[i] - mx));
  }
  if (sxx.get() == 0.0)
    throw std::invalid_argument("window collapses to one omega value");
  return sxy.get() / sxx.get();
}

RegVarDiag regvar_diagnostic(double gamma, std::uint64_t omega0,
                             std::span<const std::uint64_t> omegas) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw std::invalid_argument("the index is defined for gamma > 1");
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (omegas.empty()) throw std::invalid_argument("omegas must be nonempty");

  RegVarDiag diag;
  diag.gamma = gamma;
  diag.omega0 = omega0;
  diag.points.reserve(omegas.size());

  const double log_w0 = std::log(static_cast<double>(omega0));
  for (std::uint64_t omega : omegas) {
    if (omega < omega0 + 2)
      throw std::invalid_argument("each omega must be at least omega0 + 2");
    const double w = static_cast<double>(omega);
    // d = omega * (1 - (omega^gamma - omega0^gamma) / (omega-1)^gamma),
    // evaluated as -omega * expm1(delta) with delta assembled from log1p so
    // the two near-one factors never collapse to 1 in double precision
    const double delta = -gamma * std::log1p(-1.0 / w) +
                         std::log1p(-std::exp(gamma * (log_w0 - std::log(w))));
    diag.points.push_back({omega, -w * std::expm1(delta)});
  }
  return diag;
}

double tail_compare(const TailCurve& a, const TailCurve& b, double omega_lo,
                    double omega_hi) {
  if (!(omega_hi >= omega_lo))
    throw std::invalid_argument("need omega_lo <= omega_hi");
  if (omega_lo < a.first_omega() || omega_lo < b.first_omega())
    throw std::invalid_argument(
        "window starts before one of the curves begins");

  // both curves are right-continuous steps, so the supremum over the window
  // is attained at the window start or at a step inside it
  std::vector<double> probes;
  probes.push_back(omega_lo);
  for (const TailPoint& p : a.points())
    if (p.omega > omega_lo && p.omega <= omega_hi) probes.push_back(p.omega);
  for (const TailPoint& p : b.points())
    if (p.omega > omega_lo && p.omega <= omega_hi) probes.push_back(p.omega);
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  double sup = 0.0;
  for (double omega : probes)
    sup = std::max(sup, std::abs(a.value_at(omega) - b.value_at(omega)));
  return sup;
}

}  // namespace urnsim
