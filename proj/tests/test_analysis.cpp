#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "urnsim/analysis.hpp"
#include "urnsim/rng.hpp"
#include "urnsim/tail_curve.hpp"

using urnsim::CurveSource;
using urnsim::ExponentialFit;
using urnsim::fit_exponential;
using urnsim::fit_power_law_mle;
using urnsim::PowerLawFit;
using urnsim::RegVarDiag;
using urnsim::regvar_diagnostic;
using urnsim::Rng;
using urnsim::tail_compare;
using urnsim::tail_slope;
using urnsim::TailCurve;
using urnsim::TailPoint;

TEST_CASE("the power-law fit reproduces a hand-computed case") {
  const double e1 = std::exp(1.0);
  const double e2 = std::exp(2.0);
  // log-sum = 1 + 1 + 2 = 4, n = 3: beta = 1 + 3/4
  const std::vector<double> samples = {e1, e1, e2};
  const PowerLawFit fit = fit_power_law_mle(samples, 1.0);
  CHECK(fit.beta == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(fit.x_min == 1.0);
  CHECK(fit.n_tail == 3);
  CHECK(fit.std_err == doctest::Approx(0.75 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("samples below x_min are excluded, not counted") {
  const double e1 = std::exp(1.0);
  const double e2 = std::exp(2.0);
  const std::vector<double> samples = {0.2, e1, 0.9, e1, e2, 0.5};
  const PowerLawFit fit = fit_power_law_mle(samples, 1.0);
  CHECK(fit.beta == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(fit.n_tail == 3);
}

TEST_CASE("degenerate tails are an error, not an infinite exponent") {
  const std::vector<double> flat = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(fit_power_law_mle(flat, 1.0), std::runtime_error);

  const std::vector<double> ok = {2.0, 3.0};
  CHECK_THROWS_AS(fit_power_law_mle(ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law_mle(ok, -1.0), std::invalid_argument);

  const std::vector<double> one = {5.0};
  CHECK_THROWS_AS(fit_power_law_mle(one, 1.0), std::invalid_argument);

  const std::vector<double> bad = {2.0, std::nan("")};
  CHECK_THROWS_AS(fit_power_law_mle(bad, 1.0), std::invalid_argument);
}

TEST_CASE("the fit recovers the exponent of inverse-transform samples") {
  // x = x_min u^{-1/(beta-1)} has survival (x/x_min)^{-(beta-1)}
  const double beta = 2.0;
  const double x_min = 1.0;
  Rng rng(31);
  std::vector<double> samples;
  const int n = 20000;
  samples.reserve(n);
  for (int i = 0; i < n; ++i)
    samples.push_back(x_min *
                      std::pow(rng.uniform_open01(), -1.0 / (beta - 1.0)));
  const PowerLawFit fit = fit_power_law_mle(samples, x_min);
  CHECK(fit.n_tail == n);
  // std_err ~ 0.007, so 0.04 is over five standard errors
  CHECK(std::abs(fit.beta - beta) < 0.04);
}

TEST_CASE("the exponential fit is one over the mean") {
  const std::vector<double> single = {2.0};
  const ExponentialFit fit = fit_exponential(single);
  CHECK(fit.rate == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fit.n == 1);

  const std::vector<double> several = {1.0, 2.0, 3.0};
  CHECK(fit_exponential(several).rate == doctest::Approx(0.5).epsilon(1e-14));

  const std::vector<double> empty;
  CHECK_THROWS_AS(fit_exponential(empty), std::invalid_argument);
  const std::vector<double> nonpositive = {1.0, 0.0};
  CHECK_THROWS_AS(fit_exponential(nonpositive), std::invalid_argument);
  const std::vector<double> negative = {1.0, -2.0};
  CHECK_THROWS_AS(fit_exponential(negative), std::invalid_argument);
}

TEST_CASE("tail_slope reads an exact power law off a curve") {
  std::vector<TailPoint> points;
  for (double omega : {1.0, 2.0, 5.0, 10.0, 30.0, 100.0})
    points.push_back({omega, std::pow(omega, -2.0)});
  const TailCurve curve(std::move(points), CurveSource::Predicted);
  CHECK(tail_slope(curve, 1.0, 100.0) == doctest::Approx(-2.0).epsilon(1e-12));
  // a sub-window still sees the same slope
  CHECK(tail_slope(curve, 2.0, 30.0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("tail_slope skips nonpositive probabilities and validates windows") {
  // a predicted curve may dip to zero and below; those points carry no
  // log-log information and are dropped
  const TailCurve curve({{1.0, 1.0},
                         {2.0, 0.25},
                         {4.0, 1.0 / 16.0},
                         {8.0, 0.0},
                         {16.0, -0.5}},
                        CurveSource::Predicted);
  CHECK(tail_slope(curve, 1.0, 16.0) == doctest::Approx(-2.0).epsilon(1e-12));

  CHECK_THROWS_AS(tail_slope(curve, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(tail_slope(curve, 5.0, 2.0), std::invalid_argument);
  // only two positive points in [1, 2]: not enough
  CHECK_THROWS_AS(tail_slope(curve, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("tail_slope needs spread in omega") {
  const TailCurve curve({{2.0, 0.5}}, CurveSource::Predicted);
  CHECK_THROWS_AS(tail_slope(curve, 1.9, 2.1), std::invalid_argument);
}

TEST_CASE("the ranking index matches its definition computed in long double") {
  const double gamma = 1.4;
  const std::vector<std::uint64_t> omegas = {10,   100,    1000,
                                             10000, 100000, 1000000};
  const RegVarDiag diag = regvar_diagnostic(gamma, 1, omegas);
  CHECK(diag.gamma == gamma);
  CHECK(diag.omega0 == 1);
  REQUIRE(diag.points.size() == omegas.size());
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const long double w = static_cast<long double>(omegas[k]);
    const long double g = static_cast<long double>(gamma);
    const long double direct =
        w * (1.0L - (std::pow(w, g) - 1.0L) / std::pow(w - 1.0L, g));
    CHECK(diag.points[k].omega == omegas[k]);
    CHECK(diag.points[k].d ==
          doctest::Approx(static_cast<double>(direct)).epsilon(1e-8));
  }
}

TEST_CASE("the ranking index approaches -gamma from above") {
  const double gamma = 1.4;
  const std::vector<std::uint64_t> omegas = {100, 1000, 10000};
  const RegVarDiag diag = regvar_diagnostic(gamma, 1, omegas);
  double previous_gap = 1e9;
  for (const auto& point : diag.points) {
    const double gap = std::abs(point.d + gamma);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
  CHECK(previous_gap < 0.05);
}

TEST_CASE("the ranking index validates its inputs") {
  const std::vector<std::uint64_t> omegas = {10, 100};
  CHECK_THROWS_AS(regvar_diagnostic(1.0, 1, omegas), std::invalid_argument);
  CHECK_THROWS_AS(regvar_diagnostic(0.8, 1, omegas), std::invalid_argument);
  CHECK_THROWS_AS(regvar_diagnostic(1.4, 0, omegas), std::invalid_argument);
  const std::vector<std::uint64_t> empty;
  CHECK_THROWS_AS(regvar_diagnostic(1.4, 1, empty), std::invalid_argument);
  const std::vector<std::uint64_t> too_close = {4};
  CHECK_THROWS_AS(regvar_diagnostic(1.4, 3, too_close), std::invalid_argument);
}

TEST_CASE("tail_compare finds the largest gap across both step sets") {
  const TailCurve a({{1.0, 1.0}, {2.0, 0.5}, {4.0, 0.2}},
                    CurveSource::Predicted);
  const TailCurve b({{1.0, 0.9}, {3.0, 0.4}}, CurveSource::Predicted);
  // gaps at the probe points 1, 2, 3, 4: 0.1, 0.4, 0.1, 0.2
  CHECK(tail_compare(a, b, 1.0, 4.0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(tail_compare(b, a, 1.0, 4.0) == doctest::Approx(0.4).epsilon(1e-14));
  // a window that starts between breakpoints still sees the carried value
  CHECK(tail_compare(a, b, 2.5, 4.0) == doctest::Approx(0.4).epsilon(1e-14));
  // past both last points the curves are flat
  CHECK(tail_compare(a, b, 4.0, 50.0) == doctest::Approx(0.2).epsilon(1e-14));
  // identical curves are identically close
  CHECK(tail_compare(a, a, 1.0, 10.0) == 0.0);
}

TEST_CASE("tail_compare refuses windows outside a curve's domain") {
  const TailCurve a({{1.0, 1.0}, {2.0, 0.5}}, CurveSource::Predicted);
  const TailCurve b({{2.0, 0.7}}, CurveSource::Predicted);
  CHECK_THROWS_AS(tail_compare(a, b, 1.0, 4.0), std::invalid_argument);
  CHECK(tail_compare(a, b, 2.0, 4.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS(tail_compare(a, b, 3.0, 2.0), std::invalid_argument);
}

TEST_CASE("tail curves validate their shape") {
  CHECK_THROWS_AS(TailCurve({}, CurveSource::Empirical),
                  std::invalid_argument);
  CHECK_THROWS_AS(TailCurve({{1.0, 1.2}}, CurveSource::Empirical),
                  std::invalid_argument);
  CHECK_THROWS_AS(TailCurve({{0.0, 1.0}}, CurveSource::Empirical),
                  std::invalid_argument);
  CHECK_THROWS_AS(TailCurve({{2.0, 0.5}, {2.0, 0.4}}, CurveSource::Empirical),
                  std::invalid_argument);
  CHECK_THROWS_AS(TailCurve({{1.0, 0.5}, {2.0, 0.6}}, CurveSource::Empirical),
                  std::invalid_argument);
  // empirical curves only carry achieved (positive) probabilities...
  CHECK_THROWS_AS(TailCurve({{1.0, 0.5}, {2.0, 0.0}}, CurveSource::Empirical),
                  std::invalid_argument);
  // ...while predicted curves may legitimately cross zero
  const TailCurve predicted({{1.0, 0.5}, {2.0, -0.1}}, CurveSource::Predicted);
  CHECK(predicted.value_at(3.0) == -0.1);
}
