#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace urnsim {

// Fenwick tree over strictly positive weights.  sample_target() picks the
// index whose prefix-sum interval contains the target with a single top-down
// descent; update() adjusts one leaf.  Both are O(log N).
//
// The running total absorbs one rounding error per update.  To keep
// |root - sum(leaves)| / sum(leaves) <= 1e-9 the tree audits itself every
// 2^22 updates (cheap leaf sweep, rebuild on drift) and rebuilds
// unconditionally every 2^26 updates.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::span<const double> weights);

  std::size_t size() const { return leaf_.size(); }
  double total() const { return total_; }
  double weight(std::size_t i) const { return leaf_[i]; }

  void update(std::size_t i, double w) {
    check_weight(w);
    const double delta = w - leaf_[i];
    leaf_[i] = w;
    const std::size_t n = leaf_.size();
    for (std::size_t j = i + 1; j <= n; j += j & (~j + 1)) tree_[j] += delta;
    total_ += delta;
    ++updates_;
    if ((updates_ & kDriftCheckMask) == 0) audit();
  }

  // index of the leaf whose cumulative-weight interval contains target;
  // target must lie in [0, total).  Rounding at the extreme right edge is
  // clamped to the last leaf.
  std::size_t sample_target(double target) const {
    std::size_t pos = 0;
    const std::size_t n = leaf_.size();
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= n && tree_[next] <= target) {
        target -= tree_[next];
        pos = next;
      }
    }
    return pos < n ? pos : n - 1;
  }

  // u uniform on [0, 1)
  std::size_t sample(double u) const { return sample_target(u * total_); }

  // replaces every leaf and rebuilds; weights must be positive and finite
  void assign(std::span<const double> weights);

  // recomputes all internal sums from the leaves
  void rebuild();

  // |root - sum(leaves)| / sum(leaves), compensated leaf sweep
  double drift() const;

 private:
  static constexpr std::uint64_t kDriftCheckMask = (1ull << 22) - 1;
  static constexpr std::uint64_t kRebuildMask = (1ull << 26) - 1;

  void check_weight(double w) const {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("sampler weights must be positive and finite");
  }

  void audit();
  double leaf_sum() const;

  std::vector<double> leaf_;  // raw weights, 0-indexed
  std::vector<double> tree_;  // Fenwick sums, 1-indexed
  double total_ = 0.0;
  std::size_t top_ = 0;       // largest power of two <= size
  std::uint64_t updates_ = 0;
};

}  // namespace urnsim
