#pragma once

#include <vector>

#include "qdyn/polynomial.hpp"

namespace qdyn::model {

/// Polynomial confining potential V(q) = sum_k c_k q^k for a particle of
/// the given mass.
struct PotentialSpec {
  std::vector<double> coefficients;
  double mass = 1.0;
  bool symmetric = false;

  /// Throws InvalidArgument unless the leading coefficient has even degree
  /// and positive sign, the mass is positive, and `symmetric` agrees with
  /// the odd coefficients.
  void validate() const;
  int degree() const;
  Polynomial polynomial() const { return Polynomial(coefficients); }
};

/// Inverse temperature and unit profile. The natural-units profile has
/// hbar = k_B = 1 (with mass = 1 on the potential).
struct SystemParams {
  double beta = 1.0;
  double hbar = 1.0;
  double boltzmann = 1.0;

  void validate() const;
  double temperature() const { return 1.0 / (boltzmann * beta); }
  /// Thermal energy k_B T = 1 / beta.
  double kT() const { return 1.0 / beta; }
};

SystemParams natural_units(double beta);

PotentialSpec double_well();  // -q^2/2 + q^4/10
PotentialSpec harmonic(double mass = 1.0, double omega = 1.0);

double eval_potential(const PotentialSpec& pot, double q) noexcept;
double eval_force(const PotentialSpec& pot, double q) noexcept;
double eval_curvature(const PotentialSpec& pot, double q) noexcept;

/// Real local minima of V in ascending order. Throws DegreeTooHigh above
/// degree 8.
std::vector<double> classical_minima(const PotentialSpec& pot);

}  // namespace qdyn::model
