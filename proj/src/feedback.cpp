#include "urnsim/feedback.hpp"

#include <stdexcept>

namespace urnsim {

FeedbackFunction FeedbackFunction::power_law(double eta, double gamma) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("power-law feedback requires eta > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("power-law feedback requires gamma >= 0");
  FeedbackFunction f;
  f.power_law_ = true;
  f.eta_ = eta;
  f.gamma_ = gamma;
  return f;
}

FeedbackFunction FeedbackFunction::tabulated(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("tabulated feedback requires at least one value");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("tabulated feedback values must be positive and finite");
  FeedbackFunction f;
  f.power_law_ = false;
  f.table_ = std::move(values);
  return f;
}

void FeedbackFunction::check_domain(std::uint64_t omega) const {
  if (omega == 0)
    throw std::domain_error("feedback domain is the positive integers");
  if (!power_law_ && omega > table_.size())
    throw std::domain_error("count outside the tabulated feedback domain");
}

double FeedbackFunction::eta() const {
  if (!power_law_)
    throw std::logic_error("eta is only defined for power-law feedback");
  return eta_;
}

double FeedbackFunction::gamma() const {
  if (!power_law_)
    throw std::logic_error("gamma is only defined for power-law feedback");
  return gamma_;
}

Regime classify_regime(const FeedbackFunction& f) {
  if (!f.is_power_law())
    throw std::invalid_argument(
        "regime classification needs the full tail of f; "
        "a finite table cannot be classified");
  const double gamma = f.gamma();
  if (gamma > 1.0) return Regime::Monopoly;
  if (gamma > 0.5) return Regime::FixedRankingsNoMonopoly;
  return Regime::NoFixedRankings;
}

ExplosionBounds explosion_time_bounds(const FeedbackFunction& f,
                                      std::uint64_t omega0) {
  if (omega0 == 0)
    throw std::domain_error("omega0 must be a positive integer");
  if (!f.is_power_law() || !(f.gamma() > 1.0))
    throw std::domain_error(
        "expected blow-up time is finite only for power-law feedback with "
        "gamma > 1");
  const double eta = f.eta();
  const double gamma = f.gamma();
  const double w0 = static_cast<double>(omega0);
  const double lower = 1.0 / (eta * std::pow(w0, gamma - 1.0) * (gamma - 1.0));
  const double upper = lower + 1.0 / (eta * std::pow(w0, gamma));
  return {lower, upper};
}

}  // namespace urnsim
