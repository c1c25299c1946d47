#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "urnsim/feedback.hpp"
#include "urnsim/rng.hpp"

namespace urnsim {

// Why a trajectory ended.  Running never leaves the simulator; it exists so
// hand-built trajectories can represent an unfinished path.
enum class Outcome { Running, HitTimeCap, HitBallCap };

// One agent's continuous-time path: holding time at count omega is
// Exp(f(omega)), each jump adds one ball.
//
// jump_times holds the jumps that materialized (all <= the time cap), so
// final_count = omega0 + jump_times.size() always.  HitTimeCap means the next
// candidate jump landed past the cap and was discarded: the trajectory is the
// state observed at the cap, and final_time records the discarded candidate's
// time.  HitBallCap means a materialized jump pushed the count past the ball
// cap; final_time is that jump's time.
struct Trajectory {
  std::uint64_t omega0 = 1;
  std::vector<double> jump_times;
  std::uint64_t final_count = 1;
  double final_time = 0.0;
  Outcome outcome = Outcome::Running;
};

// Simulates one agent until a cap is hit.  time_cap may be infinity or
// ball_cap may be UINT64_MAX, but not both (the walk would never stop).
// Requires ball_cap >= omega0 and time_cap > 0.
Trajectory simulate_agent(const FeedbackFunction& f, std::uint64_t omega0,
                          double time_cap, std::uint64_t ball_cap, Rng& rng);

// HitTimeCap trajectories stalled while still below the ball cap: losers.
// HitBallCap trajectories were still collecting when they crossed it: treated
// as exploded.  Classifying a Running trajectory is an error.
enum class Fate { Loser, Exploded };
Fate classify_loser(const Trajectory& trajectory);

// count of the agent at time t along a recorded path (omega0 plus the jumps
// at or before t); t must not exceed the horizon the path was simulated to
std::uint64_t count_at(const Trajectory& trajectory, double t);

// classification the trajectory would have received under a smaller time
// cap; requires t_cap <= the cap the trajectory was simulated with
Fate fate_at(const Trajectory& trajectory, double t_cap);

// Final counts of the losers among n_sims independent agents, plus the count
// of discarded exploded trajectories.  Replica i draws from substream i of
// the seed, so results do not depend on scheduling; parallel > 1 fans the
// replicas out over that many threads.
struct LoserSample {
  std::vector<std::uint64_t> counts;  // loser final counts, each <= ball_cap
  double time_cap = 0.0;
  std::uint64_t ball_cap = 0;
  std::uint64_t n_sims = 0;
  std::uint64_t n_exploded = 0;
  std::uint64_t seed = 0;
};

LoserSample aggregate_losers(const FeedbackFunction& f, std::uint64_t omega0,
                             double time_cap, std::uint64_t ball_cap,
                             std::uint64_t n_sims, std::uint64_t seed,
                             unsigned parallel = 1);

// Loser/exploded breakdown at several time caps evaluated on the same
// trajectories: each agent is simulated once to the largest cap and then
// re-read at every smaller one.  all_counts additionally keeps the capped
// count of every agent (exploded included), the raw material for tail curves
// of the full population.
struct CapSweepPoint {
  double time_cap = 0.0;
  std::vector<std::uint64_t> loser_counts;
  std::vector<std::uint64_t> all_counts;
  std::uint64_t n_exploded = 0;
};

std::vector<CapSweepPoint> sweep_time_caps(const FeedbackFunction& f,
                                           std::uint64_t omega0,
                                           std::span<const double> time_caps,
                                           std::uint64_t ball_cap,
                                           std::uint64_t n_sims,
                                           std::uint64_t seed,
                                           unsigned parallel = 1);

// Interleaving of several agents' jump times into one event list, ordered by
// time with ties broken by agent index.
struct MergedJump {
  double time;
  std::size_t agent;
};

std::vector<MergedJump> merge_jump_times(std::span<const Trajectory> agents);

}  // namespace urnsim
