#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "urnsim/feedback.hpp"
#include "urnsim/signed_log.hpp"

namespace urnsim {

// Transient distribution of a single agent's count: the pure birth process
// that leaves state omega at rate f(omega).  The probability of holding omega
// balls at time t is an exponential sum
//
//   p_t(omega) = sum_{i=omega0..omega} a[omega][i] * exp(-f(i) t)
//
// whose coefficients satisfy, for i < omega,
//
//   a[omega][i] = f(omega-1) / (f(omega) - f(i)) * a[omega-1][i]
//
// with a[omega0][omega0] = 1 and each diagonal entry the negated row sum.
// The magnitudes blow up combinatorially, so entries live in sign-log form;
// every row still sums to zero up to the accumulated rounding of one
// compensated pass (|sum| <= 1e-8 * max |entry| is checked at build time).
class MasterSolution {
 public:
  std::uint64_t omega0() const { return omega0_; }
  std::uint64_t max_omega() const { return max_omega_; }
  const FeedbackFunction& feedback() const { return f_; }

  // a[omega][i]; requires omega0 <= i <= omega <= max_omega
  SignedLog coeff(std::uint64_t omega, std::uint64_t i) const;

  // log of the largest coefficient magnitude in the row
  double row_max_log(std::uint64_t omega) const;

 private:
  friend MasterSolution solve_coefficients(const FeedbackFunction& f,
                                           std::uint64_t omega0,
                                           std::uint64_t max_omega);
  MasterSolution(FeedbackFunction f, std::uint64_t omega0,
                 std::uint64_t max_omega)
      : f_(std::move(f)), omega0_(omega0), max_omega_(max_omega) {}

  std::size_t row_offset(std::uint64_t omega) const;

  FeedbackFunction f_;
  std::uint64_t omega0_;
  std::uint64_t max_omega_;
  std::vector<SignedLog> coeffs_;    // packed lower triangle, row-major
  std::vector<double> row_max_log_;  // per row
};

// Builds the coefficient table for omega in [omega0, max_omega].  Requires
// the feedback values over that range to be pairwise distinct (the recursion
// divides by their differences); a PowerLaw with gamma > 0 always is, while
// gamma = 0 never is -- use the Poisson closed form for that case.
MasterSolution solve_coefficients(const FeedbackFunction& f,
                                  std::uint64_t omega0,
                                  std::uint64_t max_omega);

// p_t(omega) evaluated from the table, plus an honesty flag.  The value is
// reported exactly as summed, never clamped; suspect is set when it falls
// outside [-1e-6, 1 + 1e-6] or when the summation lost more than twelve
// digits to cancellation (max term / |result| > 1e12).
struct MassValue {
  double value = 0.0;
  bool suspect = false;
  double cancellation_log = 0.0;  // log(max term magnitude / |result|)
};

MassValue mass_function(const MasterSolution& solution, double t,
                        std::uint64_t omega);

// gamma = 0: counts grow at constant rate eta, p_t is a shifted Poisson
double closed_form_poisson(double eta, std::uint64_t omega0, double t,
                           std::uint64_t omega);

// gamma = 1: p_t is negative binomial, the Yule process marginal
double closed_form_negbin(double eta, std::uint64_t omega0, double t,
                          std::uint64_t omega);

// Pmf evaluation front end: PowerLaw with gamma = 0 routes to the Poisson
// closed form (the recursion table cannot exist there), anything else builds
// the coefficient table once and sums it per query.
class PmfSolver {
 public:
  PmfSolver(const FeedbackFunction& f, std::uint64_t omega0,
            std::uint64_t max_omega);

  MassValue evaluate(double t, std::uint64_t omega) const;
  bool poisson_route() const { return poisson_route_; }
  const MasterSolution* solution() const {
    return solution_ ? &*solution_ : nullptr;
  }

 private:
  bool poisson_route_;
  double eta_ = 0.0;
  std::uint64_t omega0_;
  std::uint64_t max_omega_;
  std::optional<MasterSolution> solution_;  // empty on the poisson route
};

// Leading-term shortcut for a superlinear power law: everything but the
// slowest-decaying exponential is dropped, leaving
//
//   p_t(omega) ~= exp(-eta omega0^gamma t)
//                 * prod_{j=omega0+1..omega} 1 / (1 - (omega0/j)^gamma)
//                 * (omega0/omega)^gamma
//
// The running products are precomputed up to max_omega at construction, so
// evaluation is O(1) and instances are safe to share across threads.
// Known to degrade for omega0 > 1: reliable() reports that.
class FirstTermApprox {
 public:
  // requires PowerLaw with gamma > 1
  FirstTermApprox(const FeedbackFunction& f, std::uint64_t omega0,
                  std::uint64_t max_omega);

  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  std::uint64_t omega0() const { return omega0_; }
  std::uint64_t max_omega() const { return max_omega_; }
  bool reliable() const { return omega0_ == 1; }

  double log_value(double t, std::uint64_t omega) const;
  double value(double t, std::uint64_t omega) const;

 private:
  double eta_;
  double gamma_;
  std::uint64_t omega0_;
  std::uint64_t max_omega_;
  std::vector<double> cum_log_prod_;  // index omega - omega0
};

// 1 - sum_{k=omega0..omega-1} of the approximate pmf: the predicted
// probability of holding at least omega balls at time t.  Exactly 1 at
// omega0.  For small t the truncated series overshoots and the value goes
// negative; it is returned as computed with suspect set (also set whenever
// the approximation itself is unreliable).
struct TailValue {
  double value = 0.0;
  bool suspect = false;
};

TailValue predicted_tail(const FirstTermApprox& approx, double t,
                         std::uint64_t omega);

// Independent route to p_t: direct adaptive Runge-Kutta integration of the
// birth equations over [omega0, max_omega], tolerance 1e-10 relative per
// step.  Truncation is exact for the retained states (probability only flows
// upward); the mass that left through max_omega is integrated alongside and
// reported as deficit.
struct OdeSolution {
  std::uint64_t omega0 = 1;
  std::uint64_t max_omega = 1;
  double t = 0.0;
  std::vector<double> p;  // index omega - omega0
  double deficit = 0.0;
};

OdeSolution ode_oracle(const FeedbackFunction& f, std::uint64_t omega0,
                       double t, std::uint64_t max_omega);

}  // namespace urnsim
