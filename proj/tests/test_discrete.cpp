#include <doctest.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "support/stats.hpp"
#include "support/two_agent_enum.hpp"
#include "urnsim/discrete.hpp"

using urnsim::FeedbackFunction;
using urnsim::PopulationState;
using urnsim::Rng;
using urnsim::SimConfig;
using urnsim::Snapshot;
using urnsim::TailCurve;

TEST_CASE("each step hands out exactly one ball") {
  PopulationState state(FeedbackFunction::power_law(1.0, 1.0),
                        {1, 1, 1, 1, 1});
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) state.step(rng);
  CHECK(state.iteration() == 10000);
  CHECK(state.total_balls() == 5 + 10000);
  const std::uint64_t direct = std::accumulate(
      state.counts().begin(), state.counts().end(), std::uint64_t{0});
  CHECK(direct == state.total_balls());
}

TEST_CASE("weights track f of the counts") {
  const auto f = FeedbackFunction::power_law(1.0, 1.3);
  PopulationState state(f, {1, 2, 3});
  Rng rng(3);
  for (int i = 0; i < 500; ++i) state.step(rng);
  for (std::size_t j = 0; j < state.num_agents(); ++j)
    CHECK(state.weight(j) == doctest::Approx(f(state.counts()[j])));
}

TEST_CASE("a single agent receives every ball") {
  PopulationState state(FeedbackFunction::power_law(1.0, 2.0), {1});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(state.step(rng) == 0);
  CHECK(state.counts()[0] == 101);
}

TEST_CASE("step_with_uniform picks by cumulative weight") {
  // counts {1,1}, gamma=1: weights {1,1}, split at u=0.5
  PopulationState state(FeedbackFunction::power_law(1.0, 1.0), {1, 1});
  CHECK(state.step_with_uniform(0.49) == 0);
  CHECK(state.step_with_uniform(0.0) == 0);
  // counts now {3,1}: agent 1 needs u >= 0.75
  CHECK(state.step_with_uniform(0.76) == 1);
}

TEST_CASE("six-step two-agent distribution matches exhaustive enumeration") {
  const auto f = FeedbackFunction::power_law(1.0, 1.5);
  const std::vector<double> exact =
      testsupport::two_agent_count_dist(f, 1, 1, 6);

  const int n_runs = 50000;
  std::vector<std::uint64_t> observed(7, 0);
  Rng rng(777);
  for (int r = 0; r < n_runs; ++r) {
    PopulationState state(f, {1, 1});
    Rng stream = rng.substream(static_cast<std::uint64_t>(r));
    for (int s = 0; s < 6; ++s) state.step(stream);
    ++observed[state.counts()[0] - 1];
  }
  const auto chi = testsupport::chi2_one_sample(observed, exact);
  CHECK(chi.below_999());
}

TEST_CASE("run snapshots at exactly the requested iterations") {
  SimConfig config;
  config.num_agents = 4;
  config.feedback = FeedbackFunction::power_law(1.0, 1.1);
  config.checkpoints = {10, 100, 1000};
  config.seed = 21;
  const std::vector<Snapshot> snaps = urnsim::run(config);
  REQUIRE(snaps.size() == 3);
  CHECK(snaps[0].iteration == 10);
  CHECK(snaps[1].iteration == 100);
  CHECK(snaps[2].iteration == 1000);
  for (const Snapshot& s : snaps) {
    const std::uint64_t total = std::accumulate(
        s.counts.begin(), s.counts.end(), std::uint64_t{0});
    CHECK(total == 4 + s.iteration);
  }
}

TEST_CASE("run is deterministic in the seed") {
  SimConfig config;
  config.num_agents = 50;
  config.feedback = FeedbackFunction::power_law(1.0, 1.2);
  config.checkpoints = {5000};
  config.seed = 99;
  const auto a = urnsim::run(config);
  const auto b = urnsim::run(config);
  CHECK(a[0].counts == b[0].counts);

  config.seed = 100;
  const auto c = urnsim::run(config);
  CHECK(a[0].counts != c[0].counts);
}

TEST_CASE("explicit initial counts are honored") {
  SimConfig config;
  config.num_agents = 3;
  config.initial_counts = {5, 1, 2};
  config.feedback = FeedbackFunction::power_law(1.0, 0.0);
  config.checkpoints = {1};
  config.seed = 0;
  const auto snaps = urnsim::run(config);
  const std::uint64_t total = std::accumulate(
      snaps[0].counts.begin(), snaps[0].counts.end(), std::uint64_t{0});
  CHECK(total == 9);
  CHECK(snaps[0].counts[0] >= 5);
}

TEST_CASE("config validation rejects malformed runs") {
  SimConfig config;
  config.num_agents = 0;
  config.checkpoints = {10};
  CHECK_THROWS_AS(urnsim::run(config), std::invalid_argument);

  config.num_agents = 2;
  config.checkpoints = {10, 10};
  CHECK_THROWS_AS(urnsim::run(config), std::invalid_argument);
  config.checkpoints = {10, 5};
  CHECK_THROWS_AS(urnsim::run(config), std::invalid_argument);
  config.checkpoints = {};
  CHECK_THROWS_AS(urnsim::run(config), std::invalid_argument);

  config.checkpoints = {10};
  config.initial_counts = {1, 0};  // zero balls is outside the domain of f
  CHECK_THROWS_AS(urnsim::run(config), std::invalid_argument);
  config.initial_counts = {1, 1, 1};  // wrong length
  CHECK_THROWS_AS(urnsim::run(config), std::invalid_argument);
}

TEST_CASE("empirical tail evaluates suffix shares at distinct values") {
  const std::vector<std::uint64_t> counts{1, 2, 2, 5};
  const TailCurve curve = urnsim::empirical_tail(counts);
  REQUIRE(curve.points().size() == 3);
  CHECK(curve.value_at(1) == doctest::Approx(1.0));
  CHECK(curve.value_at(2) == doctest::Approx(0.75));
  CHECK(curve.value_at(3) == doctest::Approx(0.75));  // carried from the point at 2
  CHECK(curve.value_at(5) == doctest::Approx(0.25));
  CHECK(curve.value_at(100) == doctest::Approx(0.25));
  CHECK_THROWS_AS(curve.value_at(0.5), std::domain_error);
}

TEST_CASE("huge feedback values trigger rescaling without changing behavior") {
  // gamma=200: f(32) ~ 1e301 crosses the rescale threshold after a handful of
  // steps; the sampler must keep working and conserving balls past that point
  PopulationState state(FeedbackFunction::power_law(1.0, 200.0), {1, 1, 1});
  Rng rng(6);
  for (int i = 0; i < 3000; ++i) state.step(rng);
  CHECK(state.total_balls() == 3 + 3000);
  // with this much feedback one agent must have run away with nearly all
  std::uint64_t biggest = 0;
  for (std::uint64_t c : state.counts()) biggest = std::max(biggest, c);
  CHECK(biggest > 2900);
}

TEST_CASE("initial counts whose raw weights overflow are handled") {
  // f(1000) = 1000^200 = 1e600 overflows a double outright, so the state has
  // to start scaled rather than rescale later
  PopulationState state(FeedbackFunction::power_law(1.0, 200.0), {1000, 1});
  CHECK(state.total_balls() == 1001);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) state.step(rng);
  CHECK(state.total_balls() == 1001 + 200);
  // a 1e600x weight advantage is insurmountable: agent 0 wins every draw
  CHECK(state.counts()[0] == 1200);
  CHECK(state.counts()[1] == 1);
}
