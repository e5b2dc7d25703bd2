#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qdyn::pimd {

/// Massive Nose-Hoover chains: one chain of `length` thermostats attached
/// to every degree of freedom, integrated with the Martyna-Tuckerman-Klein
/// factorization (Suzuki-Yoshida weights of order 1 or 3, each applied over
/// `substeps` equal inner steps).
class ThermostatChains {
 public:
  ThermostatChains(std::size_t n_dof, int length, double kT, double frequency, int yoshida_order,
                   int substeps, std::mt19937_64& rng);

  /// Propagates every chain by `dt` and rescales the matching momenta.
  void propagate(std::span<double> momenta, std::span<const double> masses, double dt);

  /// Chain kinetic plus kT-weighted position terms (conserved-energy piece).
  double energy() const;

  int length() const noexcept { return length_; }
  double mass() const noexcept { return mass_; }
  std::size_t n_dof() const noexcept { return n_dof_; }

 private:
  std::size_t n_dof_;
  int length_;
  double kT_;
  double mass_;  // Q_j = kT / frequency^2 for all links
  std::vector<double> weights_;
  std::vector<double> eta_;  // link-major: entry j * n_dof + i
  std::vector<double> vel_;
  std::vector<double> force_, decay_, ke2_, scale_;  // scratch
};

}  // namespace qdyn::pimd
