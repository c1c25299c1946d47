#include "urnsim/weighted_sampler.hpp"

#include "urnsim/stable_sum.hpp"

namespace urnsim {

WeightedSampler::WeightedSampler(std::span<const double> weights) {
  if (weights.empty())
    throw std::invalid_argument("sampler needs at least one weight");
  for (double w : weights) check_weight(w);
  leaf_.assign(weights.begin(), weights.end());
  top_ = 1;
  while (top_ * 2 <= leaf_.size()) top_ *= 2;
  rebuild();
}

void WeightedSampler::assign(std::span<const double> weights) {
  if (weights.size() != leaf_.size())
    throw std::invalid_argument("assign must keep the leaf count");
  for (double w : weights) check_weight(w);
  leaf_.assign(weights.begin(), weights.end());
  rebuild();
}

void WeightedSampler::rebuild() {
  const std::size_t n = leaf_.size();
  tree_.assign(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    tree_[i] += leaf_[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= n) tree_[parent] += tree_[i];
  }
  total_ = leaf_sum();
}

double WeightedSampler::leaf_sum() const {
  StableSum s;
  for (double w : leaf_) s.add(w);
  return s.get();
}

double WeightedSampler::drift() const {
  const double exact = leaf_sum();
  return std::abs(total_ - exact) / exact;
}

void WeightedSampler::audit() {
  if ((updates_ & kRebuildMask) == 0 || drift() > 1e-9) rebuild();
}

}  // namespace urnsim
