#include "qdyn/epac.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qdyn/error.hpp"

namespace qdyn::epac {

namespace {

// A coth(beta hbar w / 2) cos wt - i A sin wt + Q_min^2 with A = hbar / (2 M w);
// the zero-temperature form has coth = 1.
CorrelationSeries single_mode(const EpacParameters& p, double M, double w, SeriesKind kind,
                              const std::vector<double>& times) {
  const double A = p.hbar / (2.0 * M * w);
  const double c = p.zero_temperature ? 1.0 : coth_half(p.beta * p.hbar * w);
  const double offset = p.Q_min * p.Q_min;
  CorrelationSeries out;
  out.kind = kind;
  out.beta = p.zero_temperature ? std::numeric_limits<double>::infinity() : p.beta;
  out.times = times;
  out.values.reserve(times.size());
  for (double t : times) out.values.emplace_back(A * c * std::cos(w * t) + offset, -A * std::sin(w * t));
  return out;
}

}  // namespace

void EpacParameters::validate() const {
  if (!(omega_beta > 0.0) || !std::isfinite(omega_beta))
    throw Error(ErrorCode::InvalidArgument, "EPAC needs a finite omega_beta > 0");
  if (!(mass > 0.0) || !(hbar > 0.0)) throw Error(ErrorCode::InvalidArgument, "EPAC needs mass, hbar > 0");
  if (!zero_temperature && !(beta > 0.0 && std::isfinite(beta)))
    throw Error(ErrorCode::InvalidArgument, "finite-temperature EPAC needs 0 < beta < inf; set the zero-temperature flag");
  if (Z_beta && !(*Z_beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "Z_beta must be positive");
  if (!std::isfinite(Q_min)) throw Error(ErrorCode::InvalidArgument, "Q_min must be finite");
}

double coth_half(double x) noexcept {
  const double y = 0.5 * x;
  if (std::abs(x) < 1e-6) return 1.0 / y + y / 3.0;
  return 1.0 / std::tanh(y);
}

CorrelationSeries epac_correlation(const EpacParameters& p, const std::vector<double>& times) {
  p.validate();
  if (p.zero_temperature) throw Error(ErrorCode::InvalidArgument, "use epac_zero_temperature for beta = inf");
  if (p.Z_beta) throw Error(ErrorCode::InvalidArgument, "leading-order EPAC uses the bare mass; use epac2_correlation");
  return single_mode(p, p.mass, p.omega_beta, SeriesKind::Epac, times);
}

SpectralLines epac_spectral_function(const EpacParameters& p) {
  p.validate();
  const double w = p.omega_beta;
  const double a = std::numbers::pi * p.hbar / (p.mass * w);
  SpectralLines out;
  out.kind = LineKind::SpectralFunction;
  out.beta = p.zero_temperature ? std::numeric_limits<double>::infinity() : p.beta;
  out.lines = {{-w, -a}, {w, a}};
  return out;
}

SpectralLines epac_spectrum(const EpacParameters& p) {
  p.validate();
  const double w = p.omega_beta;
  SpectralLines out;
  out.kind = LineKind::Epac;
  out.beta = p.zero_temperature ? std::numeric_limits<double>::infinity() : p.beta;
  if (p.zero_temperature) {
    out.lines.push_back({w, std::numbers::pi * p.hbar / (p.mass * w)});
  } else {
    // E(omega) pi / (m w^2 beta) with E(omega) = beta hbar omega / (1 - exp(-beta hbar omega))
    const double x = p.beta * p.hbar * w;
    const double up = std::numbers::pi * p.hbar / (p.mass * w) / -std::expm1(-x);
    out.lines.push_back({-w, up * std::exp(-x)});
    out.lines.push_back({w, up});
  }
  if (p.Q_min != 0.0) out.lines.insert(out.lines.begin() + (p.zero_temperature ? 0 : 1), {0.0, 2.0 * std::numbers::pi * p.Q_min * p.Q_min});
  return out;
}

double second_order_frequency(const EpacParameters& p) {
  p.validate();
  if (!p.Z_beta) throw Error(ErrorCode::InvalidArgument, "second-order EPAC needs Z_beta");
  return std::sqrt(p.curvature() / *p.Z_beta);
}

CorrelationSeries epac2_correlation(const EpacParameters& p, const std::vector<double>& times) {
  const double w = second_order_frequency(p);
  return single_mode(p, *p.Z_beta, w, SeriesKind::Epac2, times);
}

CorrelationSeries epac_zero_temperature(const EpacParameters& p, const std::vector<double>& times) {
  p.validate();
  if (!p.zero_temperature) throw Error(ErrorCode::InvalidArgument, "zero-temperature EPAC needs the beta = inf flag");
  if (p.Z_beta) return single_mode(p, *p.Z_beta, second_order_frequency(p), SeriesKind::EpacZeroTemperature, times);
  return single_mode(p, p.mass, p.omega_beta, SeriesKind::EpacZeroTemperature, times);
}

}  // namespace qdyn::epac
