#pragma once

#include <optional>
#include <vector>

#include "qdyn/series.hpp"

namespace qdyn::epac {

struct EpacParameters {
  double omega_beta = 1.0;
  double Q_min = 0.0;
  double mass = 1.0;
  double beta = 1.0;
  bool zero_temperature = false;  // beta is ignored when set
  std::optional<double> Z_beta;   // second-order kinetic coefficient, supplied externally
  double hbar = 1.0;

  void validate() const;
  /// d^2 V_beta / dQ^2 at Q_min, reconstructed as m omega_beta^2.
  double curvature() const { return mass * omega_beta * omega_beta; }
};

/// coth(x / 2), with the small-x series used below 1e-6.
double coth_half(double x) noexcept;

/// Leading order: (hbar / 2 m w) coth(beta hbar w / 2) cos wt - i (hbar / 2 m w) sin wt + Q_min^2.
/// Requires finite beta and no Z_beta.
CorrelationSeries epac_correlation(const EpacParameters& p, const std::vector<double>& times);

/// (pi hbar / m w) [delta(omega - w) - delta(omega + w)].
SpectralLines epac_spectral_function(const EpacParameters& p);

/// Lines at +-w with weight E(omega) pi / (m w^2 beta), plus 2 pi Q_min^2 at 0
/// when Q_min != 0. At zero temperature: 2 pi (hbar / 2 m w) at +w only.
SpectralLines epac_spectrum(const EpacParameters& p);

/// sqrt(curvature / Z_beta).
double second_order_frequency(const EpacParameters& p);

/// Second order: the leading-order form with m -> Z_beta and w -> w^S.
/// Uses the zero-temperature form when the flag is set.
CorrelationSeries epac2_correlation(const EpacParameters& p, const std::vector<double>& times);

/// (hbar / 2 m w_eff) exp(-i w_eff t) + Q_min^2, or the Z_beta form when Z_beta is set.
CorrelationSeries epac_zero_temperature(const EpacParameters& p, const std::vector<double>& times);

}  // namespace qdyn::epac
