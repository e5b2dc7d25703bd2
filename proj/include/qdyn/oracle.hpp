#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qdyn/model.hpp"
#include "qdyn/series.hpp"

namespace qdyn::oracle {

/// Uniform grid [q_min, q_max] with n_points nodes; the two end nodes carry
/// the Dirichlet condition psi = 0.
struct GridSpec {
  double q_min = -8.0;
  double q_max = 8.0;
  int n_points = 2001;

  void validate() const;
  double spacing() const { return (q_max - q_min) / (n_points - 1); }
  double point(int i) const { return q_min + i * spacing(); }
};

enum class Stencil { ThreePoint, FivePoint };

/// Lowest eigenpairs of the 1D Hamiltonian on a grid together with position
/// matrix elements. Wavefunctions are normalized so sum_i psi^2 h = 1 and
/// sign-fixed so the first appreciable lobe is positive.
struct EigenSystem {
  GridSpec grid;
  double mass = 1.0;
  double hbar = 1.0;
  std::vector<double> energies;
  Eigen::MatrixXd wavefunctions;  // n_points x n_states, zero at the end nodes
  Eigen::MatrixXd q_elements;     // <m|q|n>

  int n_states() const { return static_cast<int>(energies.size()); }
};

/// Throws BoundaryLeak when a returned state exceeds 1e-6 next to the
/// boundary and NotConverged when the highest state is under-resolved.
EigenSystem solve_eigensystem(const model::PotentialSpec& pot, const model::SystemParams& sys,
                              const GridSpec& grid, int n_states, Stencil stencil = Stencil::FivePoint);

/// Grows the state count until exp(-beta (E_last - E_0)) < 1e-12.
EigenSystem solve_thermal_eigensystem(const model::PotentialSpec& pot, const model::SystemParams& sys,
                                      const GridSpec& grid, Stencil stencil = Stencil::FivePoint);

/// (1 - exp(-beta x)) / (beta x) with the x -> 0 limit handled by series.
double kubo_weight(double beta, double x) noexcept;

/// Eigen-sum real-time correlation <q(t) q(0)>_beta.
CorrelationSeries exact_correlation(const EigenSystem& eig, double beta, const std::vector<double>& times);
/// Kubo-transformed (canonical) correlation.
CorrelationSeries exact_canonical_correlation(const EigenSystem& eig, double beta,
                                              const std::vector<double>& times);
/// Ground-state correlation <0|q(t) q(0)|0>.
CorrelationSeries zero_temperature_correlation(const EigenSystem& eig, const std::vector<double>& times);

/// Lines at (E_m - E_n)/hbar with weights 2 pi exp(-beta E_n) |q_mn|^2 / Z.
SpectralLines exact_spectrum(const EigenSystem& eig, double beta);
/// Same lines divided by the Kubo factor.
SpectralLines exact_canonical_spectrum(const EigenSystem& eig, double beta);

/// w_beta(J) = beta^-1 log sum_n exp(-beta E_n(J)) for H - J q.
double tilted_generating_function(const model::PotentialSpec& pot, const model::SystemParams& sys,
                                  const GridSpec& grid, double J, Stencil stencil = Stencil::FivePoint);

}  // namespace qdyn::oracle
