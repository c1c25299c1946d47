#include "urnsim/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "urnsim/stable_sum.hpp"

namespace urnsim {

namespace {

constexpr double kRowSumTolerance = 1e-8;
constexpr double kMassSlack = 1e-6;
// cancellation flag threshold: more than twelve digits lost to the final
// positive-negative difference
const double kCancellationLimit = std::log(1e12);

// f(omega) - f(i) in sign-log form, assembled from logs so the difference of
// enormous values never exists in linear space:
//   log |f(omega) - f(i)| = log f(omega) + log(-expm1(log f(i) - log f(omega)))
// Tabulated feedback may decrease, so the sign is part of the result.
SignedLog rate_gap(const FeedbackFunction& f, std::uint64_t omega,
                   std::uint64_t i) {
  const double log_a = f.log_value(omega);
  const double log_b = f.log_value(i);
  if (log_a == log_b) {
    // logs collided by rounding; the raw values still differ (distinctness is
    // checked up front) and are of one magnitude, so subtract directly
    return SignedLog::from_double(f(omega) - f(i));
  }
  const double hi = std::max(log_a, log_b);
  const double lo = std::min(log_a, log_b);
  const double log_abs = hi + std::log(-std::expm1(lo - hi));
  return SignedLog::make(log_a > log_b ? 1 : -1, log_abs);
}

}  // namespace

std::size_t MasterSolution::row_offset(std::uint64_t omega) const {
  // rows omega0..omega; row omega holds omega - omega0 + 1 entries
  const std::uint64_t r = omega - omega0_;
  return static_cast<std::size_t>(r * (r + 1) / 2);
}

SignedLog MasterSolution::coeff(std::uint64_t omega, std::uint64_t i) const {
  if (omega < omega0_ || omega > max_omega_ || i < omega0_ || i > omega)
    throw std::out_of_range("coefficient index outside the solved triangle");
  return coeffs_[row_offset(omega) + (i - omega0_)];
}

double MasterSolution::row_max_log(std::uint64_t omega) const {
  if (omega < omega0_ || omega > max_omega_)
    throw std::out_of_range("row outside the solved triangle");
  return row_max_log_[omega - omega0_];
}

MasterSolution solve_coefficients(const FeedbackFunction& f,
                                  std::uint64_t omega0,
                                  std::uint64_t max_omega) {
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (max_omega < omega0)
    throw std::invalid_argument("max_omega must be >= omega0");
  if (max_omega > f.max_omega())
    throw std::domain_error("max_omega outside the feedback domain");
  if (f.is_power_law() && f.gamma() == 0.0)
    throw std::domain_error(
        "gamma = 0 has tied rates; use the Poisson closed form");

  // the recursion divides by f(omega) - f(i): all rates must differ
  {
    std::vector<double> sorted;
    sorted.reserve(static_cast<std::size_t>(max_omega - omega0 + 1));
    for (std::uint64_t w = omega0; w <= max_omega; ++w) sorted.push_back(f(w));
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::domain_error(
          "feedback rates tie over the requested range; the exponential-sum "
          "coefficients are undefined");
  }

  MasterSolution sol(f, omega0, max_omega);
  const std::size_t n_rows = static_cast<std::size_t>(max_omega - omega0 + 1);
  sol.coeffs_.resize(n_rows * (n_rows + 1) / 2);
  sol.row_max_log_.resize(n_rows);

  auto at = [&](std::uint64_t omega, std::uint64_t i) -> SignedLog& {
    return sol.coeffs_[sol.row_offset(omega) + (i - omega0)];
  };

  at(omega0, omega0) = SignedLog::make(1, 0.0);
  sol.row_max_log_[0] = 0.0;

  for (std::uint64_t omega = omega0 + 1; omega <= max_omega; ++omega) {
    const double log_f_prev = f.log_value(omega - 1);
    SignedLogSum row_sum;
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = omega0; i < omega; ++i) {
      const SignedLog prev = at(omega - 1, i);
      const SignedLog gap = rate_gap(f, omega, i);
      // a[omega][i] = f(omega-1) / (f(omega) - f(i)) * a[omega-1][i]
      const SignedLog entry = SignedLog::make(
          prev.sign * gap.sign, prev.log_abs + log_f_prev - gap.log_abs);
      at(omega, i) = entry;
      row_sum.add(entry);
      if (entry.sign != 0) row_max = std::max(row_max, entry.log_abs);
    }
    const SignedLog diag = row_sum.result().negated();
    at(omega, omega) = diag;
    if (diag.sign != 0) row_max = std::max(row_max, diag.log_abs);
    sol.row_max_log_[omega - omega0] = row_max;

    // the diagonal is the negated row sum by construction; re-summing the
    // whole row measures the rounding actually incurred
    SignedLogSum check = row_sum;
    check.add(diag);
    const SignedLog residual = check.result();
    if (residual.sign != 0 &&
        residual.log_abs > std::log(kRowSumTolerance) + row_max)
      throw std::runtime_error(
          "coefficient row failed the zero-sum check; the table is not "
          "trustworthy at this size");
  }
  return sol;
}

MassValue mass_function(const MasterSolution& solution, double t,
                        std::uint64_t omega) {
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  if (omega < solution.omega0() || omega > solution.max_omega())
    throw std::out_of_range("omega outside the solved range");

  const FeedbackFunction& f = solution.feedback();
  SignedLogSum sum;
  for (std::uint64_t i = solution.omega0(); i <= omega; ++i) {
    const SignedLog a = solution.coeff(omega, i);
    if (a.sign == 0) continue;
    const double decay = t == 0.0 ? 0.0 : -f(i) * t;
    sum.add(a.scaled(decay));
  }
  const SignedLog total = sum.result();

  MassValue out;
  out.value = total.to_double();
  out.cancellation_log = total.sign == 0
                             ? std::numeric_limits<double>::infinity()
                             : sum.max_term_log() - total.log_abs;
  out.suspect = out.value < -kMassSlack || out.value > 1.0 + kMassSlack ||
                out.cancellation_log > kCancellationLimit;
  return out;
}

double closed_form_poisson(double eta, std::uint64_t omega0, double t,
                           std::uint64_t omega) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  if (omega < omega0) return 0.0;
  const auto k = static_cast<double>(omega - omega0);
  if (t == 0.0) return k == 0.0 ? 1.0 : 0.0;
  // (eta t)^k e^{-eta t} / k!
  return std::exp(k * std::log(eta * t) - eta * t - std::lgamma(k + 1.0));
}

double closed_form_negbin(double eta, std::uint64_t omega0, double t,
                          std::uint64_t omega) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  if (omega < omega0) return 0.0;
  const auto k = static_cast<double>(omega - omega0);  // balls gained
  const auto w = static_cast<double>(omega);
  const auto w0 = static_cast<double>(omega0);
  if (t == 0.0) return k == 0.0 ? 1.0 : 0.0;
  // C(omega-1, omega-omega0) (1 - e^{-eta t})^{omega-omega0} e^{-eta omega0 t}
  const double log_choose =
      std::lgamma(w) - std::lgamma(k + 1.0) - std::lgamma(w0);
  const double log_growth = k * std::log(-std::expm1(-eta * t));
  return std::exp(log_choose + log_growth - eta * w0 * t);
}

PmfSolver::PmfSolver(const FeedbackFunction& f, std::uint64_t omega0,
                     std::uint64_t max_omega)
    : poisson_route_(f.is_power_law() && f.gamma() == 0.0),
      omega0_(omega0),
      max_omega_(max_omega) {
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (max_omega < omega0)
    throw std::invalid_argument("max_omega must be >= omega0");
  if (poisson_route_)
    eta_ = f.eta();
  else
    solution_.emplace(solve_coefficients(f, omega0, max_omega));
}

MassValue PmfSolver::evaluate(double t, std::uint64_t omega) const {
  if (omega < omega0_ || omega > max_omega_)
    throw std::out_of_range("omega outside the solved range");
  if (poisson_route_) {
    MassValue out;
    out.value = closed_form_poisson(eta_, omega0_, t, omega);
    return out;
  }
  return mass_function(*solution_, t, omega);
}

FirstTermApprox::FirstTermApprox(const FeedbackFunction& f,
                                 std::uint64_t omega0,
                                 std::uint64_t max_omega)
    : omega0_(omega0), max_omega_(max_omega) {
  if (!f.is_power_law() || !(f.gamma() > 1.0))
    throw std::domain_error(
        "the leading-term shortcut requires a power law with gamma > 1");
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (max_omega < omega0)
    throw std::invalid_argument("max_omega must be >= omega0");
  eta_ = f.eta();
  gamma_ = f.gamma();

  // cum_log_prod_[w - omega0] = sum_{j=omega0+1..w} -log(1 - (omega0/j)^gamma)
  cum_log_prod_.resize(static_cast<std::size_t>(max_omega - omega0 + 1));
  cum_log_prod_[0] = 0.0;
  const double log_w0 = std::log(static_cast<double>(omega0));
  StableSum acc;
  for (std::uint64_t j = omega0 + 1; j <= max_omega; ++j) {
    const double ratio_log =
        gamma_ * (log_w0 - std::log(static_cast<double>(j)));
    acc.add(-std::log1p(-std::exp(ratio_log)));
    cum_log_prod_[static_cast<std::size_t>(j - omega0)] = acc.get();
  }
}

double FirstTermApprox::log_value(double t, std::uint64_t omega) const {
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  if (omega < omega0_ || omega > max_omega_)
    throw std::out_of_range("omega outside the precomputed range");
  const double w0 = static_cast<double>(omega0_);
  const double decay = -eta_ * std::pow(w0, gamma_) * t;
  const double plateau =
      gamma_ * (std::log(w0) - std::log(static_cast<double>(omega)));
  return decay + cum_log_prod_[static_cast<std::size_t>(omega - omega0_)] +
         plateau;
}

double FirstTermApprox::value(double t, std::uint64_t omega) const {
  return std::exp(log_value(t, omega));
}

TailValue predicted_tail(const FirstTermApprox& approx, double t,
                         std::uint64_t omega) {
  if (omega < approx.omega0())
    throw std::invalid_argument("omega must be >= omega0");
  if (omega > approx.max_omega() + 1)
    throw std::out_of_range("omega outside the precomputed range");
  TailValue out;
  StableSum acc;
  for (std::uint64_t k = approx.omega0(); k < omega; ++k)
    acc.add(approx.value(t, k));
  out.value = 1.0 - acc.get();  // exactly 1 at omega0: the sum is empty
  out.suspect = out.value < 0.0 || !approx.reliable();
  return out;
}

OdeSolution ode_oracle(const FeedbackFunction& f, std::uint64_t omega0,
                       double t, std::uint64_t max_omega) {
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (max_omega < omega0)
    throw std::invalid_argument("max_omega must be >= omega0");
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");

  OdeSolution sol;
  sol.omega0 = omega0;
  sol.max_omega = max_omega;
  sol.t = t;

  const std::size_t m = static_cast<std::size_t>(max_omega - omega0 + 1);
  std::vector<double> rate(m);
  for (std::size_t i = 0; i < m; ++i) rate[i] = f(omega0 + i);

  // state: p over [omega0, max_omega] plus the absorbed overflow mass
  std::vector<double> y(m + 1, 0.0);
  y[0] = 1.0;
  if (t == 0.0) {
    sol.p.assign(y.begin(), y.end() - 1);
    return sol;
  }

  auto deriv = [&](const std::vector<double>& p, std::vector<double>& dp) {
    dp[0] = -rate[0] * p[0];
    for (std::size_t i = 1; i < m; ++i)
      dp[i] = rate[i - 1] * p[i - 1] - rate[i] * p[i];
    dp[m] = rate[m - 1] * p[m - 1];
  };

  // Cash-Karp embedded 4(5) pair, standard step-size control
  static const double b21 = 1.0 / 5;
  static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
  static const double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
  static const double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27,
                      b54 = 35.0 / 27;
  static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512,
                      b63 = 575.0 / 13824, b64 = 44275.0 / 110592,
                      b65 = 253.0 / 4096;
  static const double w1 = 37.0 / 378, w3 = 250.0 / 621, w4 = 125.0 / 594,
                      w6 = 512.0 / 1771;
  static const double e1 = 37.0 / 378 - 2825.0 / 27648,
                      e3 = 250.0 / 621 - 18575.0 / 48384,
                      e4 = 125.0 / 594 - 13525.0 / 55296,
                      e5 = -277.0 / 14336, e6 = 512.0 / 1771 - 1.0 / 4;

  constexpr double kRelTol = 1e-10;
  constexpr double kAbsTol = 1e-14;
  const double h_min = t * 1e-15;

  const double max_rate = *std::max_element(rate.begin(), rate.end());
  double h = std::min(t, 0.1 / max_rate);
  double time = 0.0;

  std::vector<double> k1(m + 1), k2(m + 1), k3(m + 1), k4(m + 1), k5(m + 1),
      k6(m + 1), tmp(m + 1), y5(m + 1);

  deriv(y, k1);
  for (;;) {
    if (h < h_min)
      throw std::runtime_error(
          "step size underflow; the system is too stiff for this integrator");
    bool last = false;
    if (time + h >= t) {
      h = t - time;
      last = true;
    }

    for (std::size_t i = 0; i <= m; ++i) tmp[i] = y[i] + h * b21 * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i <= m; ++i)
      tmp[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    deriv(tmp, k3);
    for (std::size_t i = 0; i <= m; ++i)
      tmp[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    deriv(tmp, k4);
    for (std::size_t i = 0; i <= m; ++i)
      tmp[i] =
          y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    deriv(tmp, k5);
    for (std::size_t i = 0; i <= m; ++i)
      tmp[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] +
                           b64 * k4[i] + b65 * k5[i]);
    deriv(tmp, k6);

    double err_ratio = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
      y5[i] = y[i] + h * (w1 * k1[i] + w3 * k3[i] + w4 * k4[i] + w6 * k6[i]);
      const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                              e5 * k5[i] + e6 * k6[i]);
      const double scale = kAbsTol + kRelTol * std::abs(y5[i]);
      err_ratio = std::max(err_ratio, std::abs(err) / scale);
    }

    if (err_ratio <= 1.0) {
      time += h;
      y.swap(y5);
      if (last) break;
      deriv(y, k1);
    }
    const double factor =
        err_ratio > 0.0 ? 0.9 * std::pow(err_ratio, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }

  sol.p.assign(y.begin(), y.end() - 1);
  sol.deficit = y[m];
  return sol;
}

}  // namespace urnsim
