#include "qdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdyn::stats {
namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x, double mean) {
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(x.size() - 1);
}

}  // namespace

std::vector<BlockingLevel> blocking_levels(std::span<const double> samples, std::size_t min_blocks) {
  std::vector<BlockingLevel> levels;
  std::vector<double> x(samples.begin(), samples.end());
  while (x.size() >= std::max<std::size_t>(min_blocks, 2)) {
    const double m = mean_of(x);
    const double n = static_cast<double>(x.size());
    const double se = std::sqrt(sample_variance(x, m) / n);
    levels.push_back({x.size(), se, se / std::sqrt(2.0 * (n - 1.0))});
    std::vector<double> next(x.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
    x = std::move(next);
  }
  return levels;
}

Estimate blocking_estimate(std::span<const double> samples, std::size_t min_blocks) {
  Estimate est;
  est.n = samples.size();
  if (samples.empty()) return est;
  est.mean = mean_of(samples);
  const auto levels = blocking_levels(samples, min_blocks);
  if (levels.empty()) return est;
  double worst = 0.0;
  for (const auto& l : levels) worst = std::max(worst, l.stderr_);
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const auto& cur = levels[k];
    bool flat = true;
    for (std::size_t j = k + 1; j < std::min(levels.size(), k + 3); ++j)
      if (levels[j].stderr_ > cur.stderr_ + 2.0 * cur.stderr_error * static_cast<double>(j - k)) flat = false;
    if (flat && levels[k + 1].stderr_ - cur.stderr_ < cur.stderr_error) {
      est.stderr_ = cur.stderr_;
      return est;
    }
  }
  est.stderr_ = worst;
  return est;
}

Estimate independent_estimate(std::span<const double> samples) {
  Estimate est;
  est.n = samples.size();
  if (samples.empty()) return est;
  est.mean = mean_of(samples);
  if (samples.size() > 1) est.stderr_ = std::sqrt(sample_variance(samples, est.mean) / static_cast<double>(samples.size()));
  return est;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  // splitmix64 finalizer over a golden-ratio counter
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace qdyn::stats
