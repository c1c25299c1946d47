#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace urnsim {

// Long-run behaviour of the ball-allocation process, decided by how fast the
// feedback grows:
//   Monopoly                 sum 1/f converges: one agent eventually takes
//                            every remaining ball
//   FixedRankingsNoMonopoly  sum 1/f diverges but sum 1/f^2 converges:
//                            rankings freeze, no single winner
//   NoFixedRankings          sum 1/f^2 diverges: leaders keep swapping
enum class Regime { Monopoly, FixedRankingsNoMonopoly, NoFixedRankings };

// Per-ball attraction strength as a function of the number of balls an agent
// already holds.  Two shapes:
//   PowerLaw   f(omega) = eta * omega^gamma, eta > 0, gamma >= 0
//   Tabulated  explicit positive values for omega = 1..n; queries outside
//              the table are an error, not an extrapolation
// Domain is the positive integers; values are strictly positive.
class FeedbackFunction {
 public:
  static FeedbackFunction power_law(double eta, double gamma);
  static FeedbackFunction tabulated(std::vector<double> values);

  // f(omega); omega must be in the domain
  double operator()(std::uint64_t omega) const {
    check_domain(omega);
    if (power_law_) return eta_ * std::pow(static_cast<double>(omega), gamma_);
    return table_[omega - 1];
  }

  // log f(omega), computed without forming omega^gamma (safe where the
  // linear value would overflow)
  double log_value(std::uint64_t omega) const {
    check_domain(omega);
    if (power_law_)
      return std::log(eta_) + gamma_ * std::log(static_cast<double>(omega));
    return std::log(table_[omega - 1]);
  }

  bool is_power_law() const { return power_law_; }
  double eta() const;    // PowerLaw only
  double gamma() const;  // PowerLaw only

  // largest omega in the domain; unbounded for PowerLaw
  std::uint64_t max_omega() const {
    return power_law_ ? std::numeric_limits<std::uint64_t>::max()
                      : static_cast<std::uint64_t>(table_.size());
  }

 private:
  FeedbackFunction() = default;
  void check_domain(std::uint64_t omega) const;

  bool power_law_ = true;
  double eta_ = 1.0;
  double gamma_ = 0.0;
  std::vector<double> table_;
};

// Classifies the regime from the stored exponent with exact comparisons:
// gamma > 1 Monopoly, 1/2 < gamma <= 1 FixedRankingsNoMonopoly, otherwise
// NoFixedRankings.  Tabulated functions carry no tail and cannot be
// classified; asking is an error.
Regime classify_regime(const FeedbackFunction& f);

// Bracket for the expected blow-up time sum_{omega >= omega0} 1/f(omega) of a
// superlinear power law.  lower is the integral bound
// 1 / (eta * omega0^(gamma-1) * (gamma-1)); upper adds the first term
// 1 / (eta * omega0^gamma).
struct ExplosionBounds {
  double lower;
  double upper;
};

// Requires PowerLaw with gamma > 1; anything else has a divergent sum and is
// a domain error.
ExplosionBounds explosion_time_bounds(const FeedbackFunction& f,
                                      std::uint64_t omega0);

}  // namespace urnsim
