#pragma once

#include <string_view>

#include "qdyn/oracle.hpp"

namespace qdyn::presets {

/// Sampling effort. CI keeps the whole acceptance run on one core under
/// half an hour; paper matches the published production runs.
struct Scale {
  int grid_points = 21;
  long samples = 100000;
  int degree = 15;
};

Scale ci_scale();
Scale paper_scale();
/// "ci" or "paper"; throws ConfigError otherwise.
Scale scale_from_string(std::string_view name);

/// Trotter number, centroid window [-window, window] and quadrature
/// extension used for the double well at a given beta.
struct BetaPreset {
  double beta = 1.0;
  int P = 32;
  double window = 4.0;
  double extension = 0.1;
};

/// Tabulated for beta in {0.1, 1, 10, 100}; other values are interpolated
/// (P rounded up to a power of two).
BetaPreset for_beta(double beta);

/// Eigensolver grid for the thermal oracle; hot runs populate states whose
/// tails reach past the default [-8, 8].
oracle::GridSpec oracle_grid(double beta);

}  // namespace qdyn::presets
