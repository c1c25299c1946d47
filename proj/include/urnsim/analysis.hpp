#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "urnsim/tail_curve.hpp"

namespace urnsim {

// Continuous power-law maximum-likelihood fit over the tail x >= x_min:
// beta = 1 + n / sum log(x_i / x_min).  x_min is always caller-supplied;
// picking it automatically is out of scope here.
struct PowerLawFit {
  double beta = 0.0;
  double x_min = 0.0;
  std::uint64_t n_tail = 0;
  double std_err = 0.0;  // (beta - 1) / sqrt(n_tail)
};

// Requires x_min > 0 and at least two samples >= x_min.  All tail samples
// equal to x_min make the log-sum vanish and the fit degenerate: an error,
// not an infinite beta.
PowerLawFit fit_power_law_mle(std::span<const double> samples, double x_min);

struct ExponentialFit {
  double rate = 0.0;
  std::uint64_t n = 0;
};

// rate = 1 / mean over all samples; requires a nonempty sample of positive
// values
ExponentialFit fit_exponential(std::span<const double> samples);

// Least-squares slope of log prob against log omega over the curve points
// inside [omega_lo, omega_hi].  Needs at least three points with positive
// probability in the window.
double tail_slope(const TailCurve& curve, double omega_lo, double omega_hi);

// Probe for the power-law shape of the coefficient plateau: the index
//
//   d(omega) = omega * (1 - (omega^gamma - omega0^gamma) / (omega-1)^gamma)
//
// tends to -gamma as omega grows, at rate O(omega^(1-gamma)).  Evaluated
// with log1p/expm1 so the small difference survives in double precision.
struct RegVarPoint {
  std::uint64_t omega;
  double d;
};

struct RegVarDiag {
  double gamma = 0.0;
  std::uint64_t omega0 = 1;
  std::vector<RegVarPoint> points;
};

// requires gamma > 1 and every omega >= omega0 + 2
RegVarDiag regvar_diagnostic(double gamma, std::uint64_t omega0,
                             std::span<const std::uint64_t> omegas);

// Largest absolute gap between two tail curves over [omega_lo, omega_hi],
// both read as right-continuous step functions.  The window must start at or
// after the first point of each curve.
double tail_compare(const TailCurve& a, const TailCurve& b, double omega_lo,
                    double omega_hi);

}  // namespace urnsim
