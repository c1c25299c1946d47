#include "urnsim/discrete.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace urnsim {

namespace {

constexpr double kRescaleThreshold = 1e300;
constexpr std::uint64_t kCacheLimit = 1u << 20;

// largest log weight built without a scale; e^600 ~ 4e260 leaves room for
// the total to grow before any rescale
constexpr double kMaxSafeLogWeight = 600.0;

// scaled weights of agents astronomically behind the leader can underflow to
// zero, which the sampler rejects; floor them at the smallest normal double,
// a selection probability far too small to ever matter
constexpr double kWeightFloor = std::numeric_limits<double>::min();

void validate_counts(const std::vector<std::uint64_t>& counts) {
  if (counts.empty())
    throw std::invalid_argument("population needs at least one agent");
  for (std::uint64_t c : counts)
    if (c == 0)
      throw std::invalid_argument(
          "agent counts must be >= 1; the feedback function is undefined at 0");
}

double initial_scale_log(const FeedbackFunction& f,
                         const std::vector<std::uint64_t>& counts) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint64_t c : counts) max_log = std::max(max_log, f.log_value(c));
  return max_log > kMaxSafeLogWeight ? -max_log : 0.0;
}

std::vector<double> initial_weights(const FeedbackFunction& f,
                                    const std::vector<std::uint64_t>& counts) {
  validate_counts(counts);
  const double scale = initial_scale_log(f, counts);
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    w[i] = scale == 0.0
               ? f(counts[i])
               : std::max(std::exp(f.log_value(counts[i]) + scale),
                          kWeightFloor);
  return w;
}

}  // namespace

PopulationState::PopulationState(FeedbackFunction f,
                                 std::vector<std::uint64_t> counts)
    : f_(std::move(f)),
      counts_(std::move(counts)),
      sampler_(initial_weights(f_, counts_)) {
  scale_log_ = initial_scale_log(f_, counts_);
  for (std::uint64_t c : counts_) total_balls_ += c;
  if (sampler_.total() > kRescaleThreshold) rescale();
}

double PopulationState::weight_for(std::uint64_t count) {
  if (scale_log_ != 0.0)
    return std::max(std::exp(f_.log_value(count) + scale_log_), kWeightFloor);
  if (count < kCacheLimit) {
    const auto idx = static_cast<std::size_t>(count);
    if (idx >= f_cache_.size()) {
      const std::size_t old = f_cache_.size();
      f_cache_.resize(idx + 1);
      for (std::size_t c = old; c < f_cache_.size(); ++c)
        f_cache_[c] = c == 0 ? 0.0 : f_(c);
    }
    return f_cache_[idx];
  }
  return f_(count);
}

void PopulationState::bump(std::size_t j) {
  if (counts_[j] == std::numeric_limits<std::uint64_t>::max())
    throw std::overflow_error("agent count would overflow");
  counts_[j] += 1;
  total_balls_ += 1;
  sampler_.update(j, weight_for(counts_[j]));
  ++iteration_;
  if (sampler_.total() > kRescaleThreshold) rescale();
}

void PopulationState::rescale() {
  // divide every weight by the current maximum: ratios (and therefore the
  // sampling distribution) are preserved, the largest leaf becomes 1
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint64_t c : counts_) max_log = std::max(max_log, f_.log_value(c));
  scale_log_ = -max_log;
  std::vector<double> w(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i)
    w[i] = std::max(std::exp(f_.log_value(counts_[i]) + scale_log_),
                    kWeightFloor);
  sampler_.assign(w);
}

std::vector<Snapshot> run(const SimConfig& config) {
  if (config.num_agents == 0)
    throw std::invalid_argument("num_agents must be >= 1");
  if (config.checkpoints.empty())
    throw std::invalid_argument("at least one checkpoint is required");
  for (std::size_t i = 1; i < config.checkpoints.size(); ++i)
    if (config.checkpoints[i] <= config.checkpoints[i - 1])
      throw std::invalid_argument("checkpoints must be strictly increasing");

  std::vector<std::uint64_t> counts = config.initial_counts;
  if (counts.empty()) {
    counts.assign(config.num_agents, 1);
  } else if (counts.size() != config.num_agents) {
    throw std::invalid_argument("initial_counts length must equal num_agents");
  }

  PopulationState state(config.feedback, std::move(counts));
  Rng rng(config.seed);

  std::vector<Snapshot> snapshots;
  snapshots.reserve(config.checkpoints.size());
  for (std::uint64_t checkpoint : config.checkpoints) {
    while (state.iteration() < checkpoint) state.step(rng);
    snapshots.push_back({checkpoint, state.counts()});
  }
  return snapshots;
}

TailCurve empirical_tail(std::span<const std::uint64_t> counts) {
  if (counts.empty())
    throw std::invalid_argument("empirical tail of an empty sample");
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<TailPoint> points;
  std::size_t i = 0;
  while (i < sorted.size()) {
    // everything from position i on is >= sorted[i]
    points.push_back({static_cast<double>(sorted[i]),
                      static_cast<double>(sorted.size() - i) / n});
    const std::uint64_t v = sorted[i];
    while (i < sorted.size() && sorted[i] == v) ++i;
  }
  return TailCurve(std::move(points), CurveSource::Empirical);
}

}  // namespace urnsim
