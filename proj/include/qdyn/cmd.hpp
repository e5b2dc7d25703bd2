#pragma once

#include <cstdint>
#include <vector>

#include "qdyn/effpot.hpp"
#include "qdyn/series.hpp"

namespace qdyn::cmd {

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

/// Canonical draws of (q_c, p_c) from exp(-beta [p^2 / 2m + V^c(q_c)]).
struct CentroidEnsemble {
  std::vector<PhasePoint> points;
  double beta = 1.0;
  double mass = 1.0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
};

struct EnsembleOptions {
  int walkers = 64;                 // independent thermostatted walkers run side by side
  double equilibration_time = 200.0;
  double decorrelation_time = 5.0;  // time between successive draws of one walker
  double step_fraction = 0.05;      // dt = step_fraction / omega_max
  double thermostat_frequency = 0.0;  // 0: curvature at the minimum of V^c
  double drift_tolerance = 1e-2;    // per walker, in units of kT
};

/// sqrt(max |V^c''| / m) over the fitted window of a classical curve.
double max_frequency(const effpot::EffectivePotentialCurve& ecp, double mass);

/// Positions from Nose-Hoover chain dynamics on V^c, momenta drawn exactly
/// from the Maxwell distribution. Throws ThermostatDivergence.
CentroidEnsemble sample_initial_centroids(const effpot::EffectivePotentialCurve& ecp, double mass, std::size_t n,
                                          std::uint64_t seed, const EnsembleOptions& opts = {});

struct Trajectory {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> energy;
  /// |<E~> over the last tenth - <E~> over the first tenth| / (E_0 - min V^c),
  /// with E~ the O(dt^2) modified energy of the Verlet map.
  double secular_drift = 0.0;
};

/// Velocity Verlet on F^c = -dV^c/dq, storing all n_steps + 1 points.
/// Throws InvalidArgument if dt > 0.05 / omega_max and EnergyDrift if the
/// secular drift exceeds `drift_tolerance`.
Trajectory propagate_centroid(const effpot::EffectivePotentialCurve& ecp, double mass, PhasePoint start, double dt,
                              long n_steps, double drift_tolerance = 1e-6);

struct CorrelationOptions {
  double dt = 0.0;          // 0: 0.05 / omega_max
  double t_max = 20.0;
  int sample_every = 1;     // output grid spacing in steps
  int time_origins = 1;     // >1 averages over origins spaced by origin_spacing along each trajectory
  double origin_spacing = 1.0;
  int batches = 32;
  double drift_tolerance = 1e-6;
  unsigned threads = 0;
};

/// C^c(t) = <q_c(t) q_c(0)> over the ensemble; errors by batch means over
/// contiguous groups of members. Results do not depend on the thread count.
CorrelationSeries centroid_correlation(const CentroidEnsemble& ensemble, const effpot::EffectivePotentialCurve& ecp,
                                       const CorrelationOptions& opts = {});

}  // namespace qdyn::cmd
