#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "qdyn/model.hpp"
#include "qdyn/stats.hpp"

namespace qdyn::pimd {

/// Orthogonal real transform that diagonalizes the cyclic spring matrix of a
/// P-bead ring. Mode 0 is the centroid scaled by sqrt(P): u_0 = sqrt(P) q_c.
/// Transforms go through a real FFT; the explicit basis matrix is kept for
/// reference. One instance must not be used from two threads at once.
class NormalModes {
 public:
  explicit NormalModes(int beads);

  Eigen::VectorXd to_modes(const Eigen::VectorXd& beads) const;
  Eigen::VectorXd to_beads(const Eigen::VectorXd& modes) const;
  void to_modes(const Eigen::VectorXd& beads, Eigen::VectorXd& modes) const;
  void to_beads(const Eigen::VectorXd& modes, Eigen::VectorXd& beads) const;

  /// Eigenvalue 4 sin^2(pi k / P) of the ring difference operator for mode k.
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  int beads() const noexcept { return beads_; }
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }

 private:
  int beads_;
  Eigen::MatrixXd basis_;  // column k is mode k in bead coordinates
  Eigen::VectorXd eigenvalues_;
  struct Plans;
  std::shared_ptr<const Plans> plans_;
  mutable std::vector<std::complex<double>> spectrum_;
  mutable Eigen::VectorXd real_;
};

/// Ring-polymer configuration with cached normal-mode coordinates.
struct PathState {
  Eigen::VectorXd beads;
  Eigen::VectorXd mode_momenta;
  Eigen::VectorXd modes;

  int P() const { return static_cast<int>(beads.size()); }
  double centroid() const { return beads.mean(); }
};

/// Spring constant of the ring in Phi_P: m P / (beta^2 hbar^2).
double spring_constant(const model::PotentialSpec& pot, const model::SystemParams& sys, int P);

/// Phi_P(q) = sum_j [ (m P / 2 beta^2 hbar^2) (q_j - q_{j+1})^2 + V(q_j) / P ], q_{P+1} = q_1.
double quasiparticle_potential(const model::PotentialSpec& pot, const model::SystemParams& sys, int P,
                               const Eigen::VectorXd& beads);

struct SamplerConfig {
  std::uint64_t seed = 12345;
  long equilibration_steps = 20000;
  long production_steps = 100000;
  int stride = 1;
  int chain_length = 4;
  int yoshida_order = 3;
  int thermostat_substeps = 2;
  /// MD step as a fraction of the common mode period 2 pi / omega_s.
  double step_fraction = 0.01;
  /// Lower bound on the reference curvature used to set fictitious masses.
  double curvature_floor = 1.0;
  /// Relative drift of the extended energy (per degree of freedom and kT)
  /// above which the run is declared divergent.
  double drift_tolerance = 1e-2;
};

/// Thermostat/mode frequency 2 pi / (beta hbar).
double mode_frequency(const model::SystemParams& sys);

struct MeanForce {
  double q_c = 0.0;
  double force = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  double max_constraint_error = 0.0;
  double conserved_drift = 0.0;
};

/// Constrained-centroid PIMD estimate of F^c(q_c) = -<(1/P) sum_j V'(q_j)>.
/// Throws ThermostatDivergence when the extended energy drifts too far.
MeanForce sample_constrained(const model::PotentialSpec& pot, const model::SystemParams& sys, int P, double q_c,
                             const SamplerConfig& cfg);

struct ForceTable {
  std::vector<double> q_c;
  std::vector<double> force;
  std::vector<double> stderr_;
  std::vector<std::size_t> n_samples;
  double beta = 1.0;
  int P = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return q_c.size(); }
  void validate() const;
};

/// Independent constrained runs on an ascending grid. Point i uses seed
/// derive_seed(cfg.seed, i); results do not depend on the thread count.
ForceTable centroid_force_grid(const model::PotentialSpec& pot, const model::SystemParams& sys, int P,
                               const std::vector<double>& grid, const SamplerConfig& cfg, unsigned threads = 0);

struct UnconstrainedEstimate {
  stats::Estimate centroid_sq;  // <q_0^2>
  stats::Estimate bead_sq;      // (1/P) sum_j <q_j^2>
  double conserved_drift = 0.0;
};

/// Unconstrained PIMD (all modes thermostatted and propagated).
UnconstrainedEstimate centroid_variance_estimate(const model::PotentialSpec& pot, const model::SystemParams& sys,
                                                 int P, const SamplerConfig& cfg);

}  // namespace qdyn::pimd
