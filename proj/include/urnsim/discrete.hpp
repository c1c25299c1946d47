#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "urnsim/feedback.hpp"
#include "urnsim/rng.hpp"
#include "urnsim/tail_curve.hpp"
#include "urnsim/weighted_sampler.hpp"

namespace urnsim {

// One discrete simulation: at each iteration a single ball goes to agent j
// with probability f(counts[j]) / sum_i f(counts[i]).
struct SimConfig {
  std::uint64_t num_agents = 0;
  // empty means one ball per agent; counts must be >= 1 (the feedback
  // function is defined on positive counts only)
  std::vector<std::uint64_t> initial_counts;
  FeedbackFunction feedback = FeedbackFunction::power_law(1.0, 1.0);
  // iterations at which to snapshot, strictly increasing; the last entry is
  // the run length
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t seed = 0;
};

struct Snapshot {
  std::uint64_t iteration;
  std::vector<std::uint64_t> counts;
};

// Ball counts per agent plus a weight tree kept in lockstep: leaf j always
// holds f(counts[j]) times a common scale factor.  The scale is 1 until the
// weight total passes 1e300, at which point all weights are rescaled by the
// maximum (log-space evaluation keeps individual weights representable).
// Total ball count is integer arithmetic and conserved exactly.
class PopulationState {
 public:
  PopulationState(FeedbackFunction f, std::vector<std::uint64_t> counts);

  std::size_t num_agents() const { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t iteration() const { return iteration_; }
  std::uint64_t total_balls() const { return total_balls_; }
  double weight(std::size_t i) const { return sampler_.weight(i); }
  double scale_log() const { return scale_log_; }

  // hands one ball to the agent selected by u in [0,1); returns its index
  std::size_t step_with_uniform(double u) {
    const std::size_t j = sampler_.sample(u);
    bump(j);
    return j;
  }

  std::size_t step(Rng& rng) { return step_with_uniform(rng.uniform01()); }

 private:
  void bump(std::size_t j);
  double weight_for(std::uint64_t count);
  void rescale();

  FeedbackFunction f_;
  std::vector<std::uint64_t> counts_;
  WeightedSampler sampler_;
  std::vector<double> f_cache_;  // f(c) memo; counts revisit small values
  double scale_log_ = 0.0;
  std::uint64_t iteration_ = 0;
  std::uint64_t total_balls_ = 0;
};

// Runs the configured simulation and returns one snapshot per checkpoint,
// taken at exactly the requested iteration counts.  Deterministic for a
// given seed.
std::vector<Snapshot> run(const SimConfig& config);

// Empirical tail P(count >= omega) evaluated at the sorted distinct values
// present in counts: #(i : counts[i] >= omega) / N.
TailCurve empirical_tail(std::span<const std::uint64_t> counts);

}  // namespace urnsim
