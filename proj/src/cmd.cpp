#include "qdyn/cmd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "qdyn/error.hpp"
#include "qdyn/nhc.hpp"
#include "qdyn/stats.hpp"

namespace qdyn::cmd {

namespace {

constexpr int kScan = 801;

struct Surface {
  ChebyshevSeries force;
  ChebyshevSeries potential;
  ChebyshevSeries stiffness;  // dF/dq = -V''
  double lo, hi;
};

Surface surface_of(const effpot::EffectivePotentialCurve& ecp) {
  if (ecp.kind != effpot::CurveKind::Classical || !ecp.force || !ecp.potential)
    throw Error(ErrorCode::InvalidArgument, "CMD needs a classical curve with its fitted force");
  return {*ecp.force, *ecp.potential, ecp.force->derivative(), ecp.force->lo(), ecp.force->hi()};
}

double min_potential(const Surface& s) {
  double v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) v = std::min(v, s.potential(s.lo + (s.hi - s.lo) * i / (kScan - 1)));
  return v;
}

double check_step(const effpot::EffectivePotentialCurve& ecp, double mass, double dt) {
  const double limit = 0.05 / max_frequency(ecp, mass);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " does not resolve the fastest curvature (limit " << limit << ")";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return limit;
}

// Velocity Verlet from `start`; q is written at every step into q_out (size n_steps + 1).
// Returns the secular energy drift relative to the energy above the lowest point of V^c.
// The drift is read off the O(dt^2) modified Hamiltonian of the Verlet map, which
// removes the bounded oscillation of the plain energy.
double integrate(const Surface& s, double mass, PhasePoint start, double dt, long n_steps, double v_min, double* q_out,
                 double* p_out, double* e_out) {
  double q = start.q, p = start.p, f = s.force(q);
  const long window = std::max(1L, (n_steps + 1) / 10);
  double head = 0.0, tail = 0.0;
  const double e0 = p * p / (2.0 * mass) + s.potential(q);
  const double h2 = dt * dt;
  auto record = [&](long i) {
    q_out[i] = q;
    if (p_out) p_out[i] = p;
    const bool in_window = i < window || i > n_steps - window;
    if (!in_window && !e_out) return;
    const double e = p * p / (2.0 * mass) + s.potential(q);
    if (e_out) e_out[i] = e;
    if (!in_window) return;
    const double shadow = e - h2 / 12.0 * p * p * s.stiffness(q) / (mass * mass) - h2 / 24.0 * f * f / mass;
    if (i < window) head += shadow;
    if (i > n_steps - window) tail += shadow;
  };
  record(0);
  for (long i = 1; i <= n_steps; ++i) {
    p += 0.5 * dt * f;
    q += dt * p / mass;
    f = s.force(q);
    p += 0.5 * dt * f;
    record(i);
  }
  if (!std::isfinite(q) || !std::isfinite(p)) return std::numeric_limits<double>::infinity();
  const double scale = std::max(e0 - v_min, 1e-12 * std::max(1.0, std::abs(e0)));
  return std::abs(tail - head) / static_cast<double>(window) / scale;
}

void throw_drift(double drift, double tol, PhasePoint start) {
  std::ostringstream msg;
  msg << "relative secular energy drift " << drift << " exceeds " << tol << " for the trajectory from (q, p) = ("
      << start.q << ", " << start.p << "); reduce the time step";
  throw Error(ErrorCode::EnergyDrift, msg.str());
}

}  // namespace

double max_frequency(const effpot::EffectivePotentialCurve& ecp, double mass) {
  const auto s = surface_of(ecp);
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass must be positive");
  const auto dF = s.force.derivative();
  double k = 0.0;
  for (int i = 0; i < kScan; ++i) k = std::max(k, std::abs(dF(s.lo + (s.hi - s.lo) * i / (kScan - 1))));
  if (!(k > 0.0)) throw Error(ErrorCode::FlatCurvature, "fitted force is constant over its window");
  return std::sqrt(k / mass);
}

CentroidEnsemble sample_initial_centroids(const effpot::EffectivePotentialCurve& ecp, double mass, std::size_t n,
                                          std::uint64_t seed, const EnsembleOptions& opts) {
  const auto s = surface_of(ecp);
  CentroidEnsemble ens;
  ens.beta = ecp.beta;
  ens.mass = mass;
  ens.seed = seed;
  if (n == 0) return ens;
  if (opts.walkers < 1 || !(opts.step_fraction > 0.0) || !(opts.decorrelation_time > 0.0) ||
      opts.equilibration_time < 0.0)
    throw Error(ErrorCode::InvalidArgument, "ensemble options need walkers >= 1 and positive times");
  const double kT = 1.0 / ecp.beta;
  const double omega_max = max_frequency(ecp, mass);
  const double dt = opts.step_fraction / omega_max;

  double q_min = s.lo, v_low = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double q = s.lo + (s.hi - s.lo) * i / (kScan - 1);
    if (s.potential(q) < v_low) {
      v_low = s.potential(q);
      q_min = q;
    }
  }
  double omega_t = opts.thermostat_frequency;
  if (omega_t <= 0.0)
    omega_t = std::max(std::sqrt(std::max(-s.force.derivative()(q_min), 0.0) / mass), 0.1 * omega_max);
  // walkers alternate between the lowest point and its mirror image when both are thermally populated
  const bool mirror = -q_min >= s.lo && -q_min <= s.hi && s.potential(-q_min) - v_low < kT;

  const std::size_t W = std::min<std::size_t>(static_cast<std::size_t>(opts.walkers), n);
  std::vector<double> q(W), p(W), f(W), m(W, mass);
  std::mt19937_64 thermo_rng(stats::derive_seed(seed, 0)), draw_rng(stats::derive_seed(seed, 1));
  std::normal_distribution<double> maxwell(0.0, std::sqrt(mass * kT));
  for (std::size_t w = 0; w < W; ++w) {
    q[w] = (mirror && w % 2 == 1) ? -q_min : q_min;
    p[w] = maxwell(thermo_rng);
    f[w] = s.force(q[w]);
  }
  pimd::ThermostatChains nhc(W, 4, kT, omega_t, 3, 1, thermo_rng);

  const double edge = 0.5 * (s.hi - s.lo);
  auto conserved = [&] {
    double e = nhc.energy();
    for (std::size_t w = 0; w < W; ++w) e += p[w] * p[w] / (2.0 * mass) + s.potential(q[w]);
    return e;
  };
  auto step = [&] {
    nhc.propagate(p, m, 0.5 * dt);
    for (std::size_t w = 0; w < W; ++w) {
      p[w] += 0.5 * dt * f[w];
      q[w] += dt * p[w] / mass;
      if (!(q[w] > s.lo - edge && q[w] < s.hi + edge))
        throw Error(ErrorCode::ThermostatDivergence, "walker left the fitted window of V^c");
      f[w] = s.force(q[w]);
      p[w] += 0.5 * dt * f[w];
    }
    nhc.propagate(p, m, 0.5 * dt);
  };

  const long eq_steps = static_cast<long>(std::ceil(opts.equilibration_time / dt));
  const long stride = std::max(1L, static_cast<long>(std::ceil(opts.decorrelation_time / dt)));
  const std::size_t rounds = (n + W - 1) / W;
  const long total = eq_steps + static_cast<long>(rounds) * stride;
  const long window = std::max(1L, total / 10);
  double head = 0.0, tail = 0.0;
  ens.points.reserve(n);
  for (long i = 0; i < total; ++i) {
    step();
    if (i < window || i >= total - window) {
      const double e = conserved();
      if (i < window) head += e;
      if (i >= total - window) tail += e;
    }
    if (i >= eq_steps && (i - eq_steps + 1) % stride == 0) {
      for (std::size_t w = 0; w < W && ens.points.size() < n; ++w) ens.points.push_back({q[w], maxwell(draw_rng)});
    }
  }
  const double drift = std::abs(tail - head) / static_cast<double>(window) / (static_cast<double>(W) * kT);
  if (!(drift <= opts.drift_tolerance)) {
    std::ostringstream msg;
    msg << "centroid thermostat energy drift " << drift << " kT per walker exceeds " << opts.drift_tolerance;
    throw Error(ErrorCode::ThermostatDivergence, msg.str());
  }
  return ens;
}

Trajectory propagate_centroid(const effpot::EffectivePotentialCurve& ecp, double mass, PhasePoint start, double dt,
                              long n_steps, double drift_tolerance) {
  const auto s = surface_of(ecp);
  check_step(ecp, mass, dt);
  if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least one step");
  Trajectory tr;
  tr.q.resize(n_steps + 1);
  tr.p.resize(n_steps + 1);
  tr.energy.resize(n_steps + 1);
  tr.secular_drift = integrate(s, mass, start, dt, n_steps, min_potential(s), tr.q.data(), tr.p.data(), tr.energy.data());
  if (!(tr.secular_drift <= drift_tolerance)) throw_drift(tr.secular_drift, drift_tolerance, start);
  return tr;
}

CorrelationSeries centroid_correlation(const CentroidEnsemble& ensemble, const effpot::EffectivePotentialCurve& ecp,
                                       const CorrelationOptions& opts) {
  const auto s = surface_of(ecp);
  const double mass = ensemble.mass;
  const double dt = opts.dt > 0.0 ? opts.dt : 0.05 / max_frequency(ecp, mass);
  check_step(ecp, mass, dt);
  if (opts.sample_every < 1 || opts.time_origins < 1 || opts.batches < 2 || !(opts.t_max > 0.0))
    throw Error(ErrorCode::InvalidArgument, "correlation options need sample_every, time_origins >= 1 and batches >= 2");
  const std::size_t n = ensemble.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "correlation needs at least two ensemble members");

  const long k_s = opts.sample_every;
  const long n_out = static_cast<long>(std::floor(opts.t_max / (dt * k_s) + 1e-9)) + 1;
  const long origin_steps = opts.time_origins > 1 ? std::max(1L, std::lround(opts.origin_spacing / dt)) : 0;
  const long length = (n_out - 1) * k_s + (opts.time_origins - 1) * origin_steps;
  const std::size_t B = std::min<std::size_t>(static_cast<std::size_t>(opts.batches), n);
  const double v_min = min_potential(s);

  std::vector<std::vector<double>> batch_sum(B, std::vector<double>(n_out, 0.0));
  std::vector<std::exception_ptr> failures(B);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<double> q(length + 1);
    for (std::size_t b = next++; b < B; b = next++) {
      try {
        const std::size_t first = b * n / B, last = (b + 1) * n / B;
        auto& acc = batch_sum[b];
        for (std::size_t i = first; i < last; ++i) {
          const auto& start = ensemble.points[i];
          const double drift = integrate(s, mass, {start.q, start.p}, dt, length, v_min, q.data(), nullptr, nullptr);
          if (!(drift <= opts.drift_tolerance)) throw_drift(drift, opts.drift_tolerance, {start.q, start.p});
          for (int o = 0; o < opts.time_origins; ++o) {
            const long t0 = o * origin_steps;
            for (long k = 0; k < n_out; ++k) acc[k] += q[t0 + k * k_s] * q[t0];
          }
        }
        for (double& v : acc) v /= static_cast<double>((last - first) * opts.time_origins);
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(B));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  CorrelationSeries out;
  out.kind = SeriesKind::Centroid;
  out.beta = ensemble.beta;
  out.times.resize(n_out);
  out.values.resize(n_out);
  out.stderr_.resize(n_out);
  for (long k = 0; k < n_out; ++k) {
    // batches differ in size by at most one member; weight by size for the mean
    double mean = 0.0;
    for (std::size_t b = 0; b < B; ++b) mean += batch_sum[b][k] * static_cast<double>((b + 1) * n / B - b * n / B);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t b = 0; b < B; ++b) var += (batch_sum[b][k] - mean) * (batch_sum[b][k] - mean);
    out.times[k] = static_cast<double>(k * k_s) * dt;
    out.values[k] = mean;
    out.stderr_[k] = std::sqrt(var / static_cast<double>(B * (B - 1)));
  }
  return out;
}

}  // namespace qdyn::cmd
