#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qdyn::stats {

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// One level of the Flyvbjerg-Petersen blocking transformation.
struct BlockingLevel {
  std::size_t n_blocks = 0;
  double stderr_ = 0.0;
  double stderr_error = 0.0;
};

std::vector<BlockingLevel> blocking_levels(std::span<const double> samples, std::size_t min_blocks = 32);

/// Mean with an autocorrelation-aware standard error: the first blocking
/// level whose error estimate stops growing beyond its own uncertainty.
/// Falls back to the largest error seen when no plateau is reached.
Estimate blocking_estimate(std::span<const double> samples, std::size_t min_blocks = 32);

/// Mean and naive standard error of independent samples.
Estimate independent_estimate(std::span<const double> samples);

/// Deterministic per-task seed from a master seed and a task index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace qdyn::stats
