#pragma once

#include <complex>
#include <string_view>
#include <vector>

namespace qdyn {

using cplx = std::complex<double>;

enum class SeriesKind { Exact, Canonical, ZeroTemperature, Centroid, Epac, Epac2, EpacZeroTemperature };

std::string_view to_string(SeriesKind kind) noexcept;
SeriesKind series_kind_from_string(std::string_view name);

/// Position autocorrelation C(t) sampled at `times`. `stderr_` is empty for
/// deterministic series. `beta` is +inf for zero-temperature series.
struct CorrelationSeries {
  SeriesKind kind = SeriesKind::Exact;
  double beta = 1.0;
  std::vector<double> times;
  std::vector<cplx> values;
  std::vector<double> stderr_;

  std::size_t size() const noexcept { return times.size(); }
  /// Uniform step if the grid is uniform to relative 1e-9, else throws NonuniformGrid.
  double uniform_step() const;
};

enum class LineKind { Standard, Canonical, SpectralFunction, Epac };

std::string_view to_string(LineKind kind) noexcept;

struct SpectralLine {
  double omega = 0.0;
  double weight = 0.0;
};

/// Discrete delta-function spectrum sum_i weight_i delta(omega - omega_i).
struct SpectralLines {
  LineKind kind = LineKind::Standard;
  double beta = 1.0;
  std::vector<SpectralLine> lines;
};

/// Uniform grid helper: n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace qdyn
