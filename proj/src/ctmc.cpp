#include "urnsim/ctmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace urnsim {

Trajectory simulate_agent(const FeedbackFunction& f, std::uint64_t omega0,
                          double time_cap, std::uint64_t ball_cap, Rng& rng) {
  if (omega0 == 0) throw std::invalid_argument("omega0 must be >= 1");
  if (!(time_cap > 0.0)) throw std::invalid_argument("time_cap must be > 0");
  if (ball_cap < omega0)
    throw std::invalid_argument("ball_cap must be >= omega0");
  const bool unbounded_time = std::isinf(time_cap);
  if (unbounded_time && ball_cap == std::numeric_limits<std::uint64_t>::max())
    throw std::invalid_argument("at least one cap must be finite");

  Trajectory traj;
  traj.omega0 = omega0;
  traj.final_count = omega0;

  double t = 0.0;
  std::uint64_t count = omega0;
  for (;;) {
    const double candidate = t + rng.exponential(f(count));
    if (candidate > time_cap) {
      // the jump would land past the cap: discard it, the trajectory is the
      // state observed at the cap
      traj.outcome = Outcome::HitTimeCap;
      traj.final_time = candidate;
      break;
    }
    t = candidate;
    count += 1;
    traj.jump_times.push_back(t);
    if (count > ball_cap) {
      traj.outcome = Outcome::HitBallCap;
      traj.final_time = t;
      break;
    }
  }
  traj.final_count = count;
  return traj;
}

Fate classify_loser(const Trajectory& trajectory) {
  switch (trajectory.outcome) {
    case Outcome::HitTimeCap:
      return Fate::Loser;
    case Outcome::HitBallCap:
      return Fate::Exploded;
    case Outcome::Running:
      break;
  }
  throw std::invalid_argument("cannot classify a trajectory still running");
}

std::uint64_t count_at(const Trajectory& trajectory, double t) {
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  const auto& jumps = trajectory.jump_times;
  if (trajectory.outcome == Outcome::HitTimeCap) {
    // observed up to final_time (exclusive); beyond that nothing is known
    if (t >= trajectory.final_time)
      throw std::invalid_argument("t exceeds the simulated horizon");
  } else if (trajectory.outcome == Outcome::HitBallCap) {
    // the path freezes once the ball cap is crossed; any t past the last
    // jump reads the frozen state
  }
  const auto it = std::upper_bound(jumps.begin(), jumps.end(), t);
  return trajectory.omega0 +
         static_cast<std::uint64_t>(it - jumps.begin());
}

Fate fate_at(const Trajectory& trajectory, double t_cap) {
  if (!(t_cap > 0.0)) throw std::invalid_argument("t_cap must be > 0");
  if (trajectory.outcome == Outcome::Running)
    throw std::invalid_argument("cannot classify a trajectory still running");
  if (trajectory.outcome == Outcome::HitBallCap &&
      trajectory.final_time <= t_cap)
    return Fate::Exploded;
  return Fate::Loser;
}

namespace {

// runs body(i) for i in [0, n) over `parallel` threads; replica indexing
// keeps the result layout independent of scheduling
void for_each_replica(std::uint64_t n, unsigned parallel,
                      const std::function<void(std::uint64_t)>& body) {
  if (parallel <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  workers.reserve(parallel);
  for (unsigned w = 0; w < parallel; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

LoserSample aggregate_losers(const FeedbackFunction& f, std::uint64_t omega0,
                             double time_cap, std::uint64_t ball_cap,
                             std::uint64_t n_sims, std::uint64_t seed,
                             unsigned parallel) {
  if (n_sims == 0) throw std::invalid_argument("n_sims must be >= 1");
  const Rng root(seed);

  // per-replica slots first, folded in index order afterwards
  std::vector<std::uint64_t> final_counts(n_sims);
  std::vector<std::uint8_t> exploded(n_sims);
  for_each_replica(n_sims, parallel, [&](std::uint64_t i) {
    Rng rng = root.substream(i);
    const Trajectory traj = simulate_agent(f, omega0, time_cap, ball_cap, rng);
    final_counts[i] = traj.final_count;
    exploded[i] = classify_loser(traj) == Fate::Exploded ? 1 : 0;
  });

  LoserSample sample;
  sample.time_cap = time_cap;
  sample.ball_cap = ball_cap;
  sample.n_sims = n_sims;
  sample.seed = seed;
  for (std::uint64_t i = 0; i < n_sims; ++i) {
    if (exploded[i])
      sample.n_exploded += 1;
    else
      sample.counts.push_back(final_counts[i]);
  }
  return sample;
}

std::vector<CapSweepPoint> sweep_time_caps(const FeedbackFunction& f,
                                           std::uint64_t omega0,
                                           std::span<const double> time_caps,
                                           std::uint64_t ball_cap,
                                           std::uint64_t n_sims,
                                           std::uint64_t seed,
                                           unsigned parallel) {
  if (time_caps.empty()) throw std::invalid_argument("no time caps given");
  for (std::size_t k = 0; k < time_caps.size(); ++k) {
    if (!(time_caps[k] > 0.0))
      throw std::invalid_argument("time caps must be > 0");
    if (k > 0 && !(time_caps[k] > time_caps[k - 1]))
      throw std::invalid_argument("time caps must be strictly increasing");
  }
  if (n_sims == 0) throw std::invalid_argument("n_sims must be >= 1");

  const std::size_t n_caps = time_caps.size();
  const double horizon = time_caps.back();
  const Rng root(seed);

  // per replica and cap: the count observed at that cap, or the exploded
  // marker when the ball cap was crossed in time
  constexpr std::uint64_t kExploded = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> observed(n_sims * n_caps);
  for_each_replica(n_sims, parallel, [&](std::uint64_t i) {
    Rng rng = root.substream(i);
    const Trajectory traj = simulate_agent(f, omega0, horizon, ball_cap, rng);
    for (std::size_t k = 0; k < n_caps; ++k) {
      const double cap = time_caps[k];
      if (fate_at(traj, cap) == Fate::Exploded)
        observed[i * n_caps + k] = kExploded;
      else
        observed[i * n_caps + k] = count_at(traj, cap);
    }
  });

  std::vector<CapSweepPoint> points(n_caps);
  for (std::size_t k = 0; k < n_caps; ++k) {
    points[k].time_cap = time_caps[k];
    for (std::uint64_t i = 0; i < n_sims; ++i) {
      const std::uint64_t v = observed[i * n_caps + k];
      if (v == kExploded) {
        points[k].n_exploded += 1;
        points[k].all_counts.push_back(ball_cap + 1);  // capped marker value
      } else {
        points[k].loser_counts.push_back(v);
        points[k].all_counts.push_back(v);
      }
    }
  }
  return points;
}

std::vector<MergedJump> merge_jump_times(std::span<const Trajectory> agents) {
  std::vector<MergedJump> merged;
  std::size_t total = 0;
  for (const auto& traj : agents) total += traj.jump_times.size();
  merged.reserve(total);
  for (std::size_t a = 0; a < agents.size(); ++a)
    for (double t : agents[a].jump_times) merged.push_back({t, a});
  std::stable_sort(merged.begin(), merged.end(),
                   [](const MergedJump& x, const MergedJump& y) {
                     if (x.time != y.time) return x.time < y.time;
                     return x.agent < y.agent;
                   });
  return merged;
}

}  // namespace urnsim
