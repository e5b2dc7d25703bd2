#include "qdyn/series.hpp"

#include <cmath>
#include <string>

#include "qdyn/error.hpp"

namespace qdyn {

std::string_view to_string(SeriesKind kind) noexcept {
  switch (kind) {
    case SeriesKind::Exact: return "exact";
    case SeriesKind::Canonical: return "canonical";
    case SeriesKind::ZeroTemperature: return "zero_temperature";
    case SeriesKind::Centroid: return "cmd";
    case SeriesKind::Epac: return "epac";
    case SeriesKind::Epac2: return "epac2";
    case SeriesKind::EpacZeroTemperature: return "epac_zero_temperature";
  }
  return "unknown";
}

SeriesKind series_kind_from_string(std::string_view name) {
  for (auto k : {SeriesKind::Exact, SeriesKind::Canonical, SeriesKind::ZeroTemperature, SeriesKind::Centroid,
                 SeriesKind::Epac, SeriesKind::Epac2, SeriesKind::EpacZeroTemperature})
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown series kind '" + std::string(name) + "'");
}

std::string_view to_string(LineKind kind) noexcept {
  switch (kind) {
    case LineKind::Standard: return "standard";
    case LineKind::Canonical: return "canonical";
    case LineKind::SpectralFunction: return "spectral_function";
    case LineKind::Epac: return "epac";
  }
  return "unknown";
}

double CorrelationSeries::uniform_step() const {
  if (times.size() < 2) throw Error(ErrorCode::NonuniformGrid, "series needs at least two samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw Error(ErrorCode::NonuniformGrid, "time grid must be increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double expected = times[0] + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw Error(ErrorCode::NonuniformGrid, "time grid is not uniform at index " + std::to_string(i));
  }
  return dt;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  out[n - 1] = hi;
  return out;
}

}  // namespace qdyn
