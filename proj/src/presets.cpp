#include "qdyn/presets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qdyn/error.hpp"

namespace qdyn::presets {

Scale ci_scale() { return {21, 100000, 15}; }

Scale paper_scale() { return {51, 10000000, 25}; }

Scale scale_from_string(std::string_view name) {
  if (name == "ci") return ci_scale();
  if (name == "paper") return paper_scale();
  throw Error(ErrorCode::ConfigError, "scale must be 'ci' or 'paper', got '" + std::string(name) + "'");
}

BetaPreset for_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be positive and finite");
  static const BetaPreset table[] = {{0.1, 8, 7.0, 0.1}, {1.0, 32, 4.0, 0.1}, {10.0, 64, 3.0, 0.1}, {100.0, 256, 2.5, 0.02}};
  for (const auto& p : table)
    if (std::abs(beta - p.beta) <= 1e-12 * p.beta) return p;
  BetaPreset p;
  p.beta = beta;
  const double beads = std::clamp(25.0 * std::sqrt(beta), 8.0, 512.0);
  p.P = static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::ceil(beads))));
  p.window = std::max(2.5, std::round(10.0 * (2.5 + 1.5 / std::sqrt(beta))) / 10.0);
  p.extension = beta > 30.0 ? 0.02 : 0.1;
  return p;
}

oracle::GridSpec oracle_grid(double beta) {
  if (beta >= 0.5) return {};
  return {-10.0, 10.0, 3001};
}

}  // namespace qdyn::presets
