#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "support/linear_sampler.hpp"
#include "support/stats.hpp"
#include "urnsim/rng.hpp"
#include "urnsim/weighted_sampler.hpp"

using testsupport::LinearSampler;
using urnsim::Rng;
using urnsim::WeightedSampler;

namespace {

// integer-valued weights make every prefix sum exact in double, so the tree
// and the linear scan must agree on every draw, not just statistically
std::vector<double> random_integer_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& x : w) x = 1.0 + static_cast<double>(rng.next_u64() % 1000);
  return w;
}

}  // namespace

TEST_CASE("tree sampling matches the linear reference exactly on exact sums") {
  Rng rng(2024);
  for (std::size_t n : {1ull, 2ull, 3ull, 7ull, 8ull, 100ull, 1000ull}) {
    std::vector<double> w = random_integer_weights(rng, n);
    WeightedSampler tree(w);
    LinearSampler ref(w);
    CHECK(tree.total() == doctest::Approx(ref.total()));
    for (int i = 0; i < 2000; ++i) {
      const double target =
          static_cast<double>(rng.next_u64() % static_cast<std::uint64_t>(
                                  tree.total()));
      CHECK(tree.sample_target(target) == ref.sample_target(target));
    }
  }
}

TEST_CASE("updates keep the tree and reference in lockstep") {
  Rng rng(99);
  std::vector<double> w = random_integer_weights(rng, 257);
  WeightedSampler tree(w);
  LinearSampler ref(w);
  for (int round = 0; round < 5000; ++round) {
    const std::size_t i = rng.next_u64() % w.size();
    const double nw = 1.0 + static_cast<double>(rng.next_u64() % 1000);
    tree.update(i, nw);
    ref.update(i, nw);
    const double target = static_cast<double>(
        rng.next_u64() % static_cast<std::uint64_t>(tree.total()));
    CHECK(tree.sample_target(target) == ref.sample_target(target));
  }
  CHECK(tree.total() == doctest::Approx(ref.total()));
}

TEST_CASE("sampling frequencies follow the weights") {
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
  WeightedSampler tree(w);
  Rng rng(5);
  std::vector<std::uint64_t> hits(w.size(), 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[tree.sample(rng.uniform01())];
  const std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
  const auto r = testsupport::chi2_one_sample(hits, probs);
  CHECK(r.below_999());
}

TEST_CASE("edge targets select the first and last leaves") {
  const std::vector<double> w{0.5, 1.5, 2.0};
  WeightedSampler tree(w);
  CHECK(tree.sample_target(0.0) == 0);
  CHECK(tree.sample_target(0.49) == 0);
  CHECK(tree.sample_target(0.5) == 1);
  CHECK(tree.sample_target(3.99) == 2);
  // rounding at the extreme right edge clamps to the last leaf
  CHECK(tree.sample_target(4.0) == 2);
  CHECK(tree.sample(0.0) == 0);
}

TEST_CASE("weights must be positive and finite") {
  CHECK_THROWS_AS(WeightedSampler(std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightedSampler(std::vector<double>{1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightedSampler(std::vector<double>{-1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightedSampler(std::vector<double>{
                      std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  WeightedSampler tree(std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(tree.update(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tree.update(0, std::nan("")), std::invalid_argument);
}

TEST_CASE("assign replaces all weights") {
  WeightedSampler tree(std::vector<double>{1.0, 1.0, 1.0});
  tree.assign(std::vector<double>{10.0, 1.0, 1.0});
  CHECK(tree.total() == doctest::Approx(12.0));
  CHECK(tree.weight(0) == 10.0);
  CHECK(tree.sample_target(9.5) == 0);
  CHECK_THROWS_AS(tree.assign(std::vector<double>{1.0}),
                  std::invalid_argument);
}

TEST_CASE("running total stays glued to the exact leaf sum under churn") {
  Rng rng(31337);
  std::vector<double> w(512);
  for (double& x : w) x = rng.uniform_open01();
  WeightedSampler tree(w);
  for (int i = 0; i < 300000; ++i) {
    const std::size_t j = rng.next_u64() % w.size();
    tree.update(j, rng.uniform_open01() * 10.0);
  }
  CHECK(tree.drift() < 1e-9);
}
