#include "qdyn/pimd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <random>
#include <sstream>
#include <thread>

#include <fftw3.h>

#include <mutex>

#include "qdyn/error.hpp"
#include "qdyn/nhc.hpp"

namespace qdyn::pimd {

namespace {
std::mutex& planner_mutex() {  // FFTW planning is not thread-safe
  static std::mutex m;
  return m;
}
}  // namespace

struct NormalModes::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(int P) {
    std::vector<double> r(P);
    std::vector<fftw_complex> c(P / 2 + 1);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(P, r.data(), c.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_dft_c2r_1d(P, c.data(), r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

NormalModes::NormalModes(int beads) : beads_(beads), basis_(beads, beads), eigenvalues_(beads) {
  if (beads < 2) throw Error(ErrorCode::InvalidArgument, "Trotter number must be >= 2");
  const double P = beads;
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < beads; ++k) {
    eigenvalues_[k] = 4.0 * std::pow(std::sin(pi * k / P), 2);
    for (int j = 0; j < beads; ++j) {
      double v;
      if (k == 0) {
        v = 1.0 / std::sqrt(P);
      } else if (2 * k < beads) {
        v = std::sqrt(2.0 / P) * std::cos(2.0 * pi * j * k / P);
      } else if (2 * k == beads) {
        v = (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(P);
      } else {
        v = std::sqrt(2.0 / P) * std::sin(2.0 * pi * j * k / P);
      }
      basis_(j, k) = v;
    }
  }
  plans_ = std::make_shared<const Plans>(beads);
  spectrum_.resize(beads / 2 + 1);
  real_.resize(beads);
}

// X_m = sum_j q_j exp(-2 pi i j m / P); cosine modes sit in Re X_m and the
// matching sine modes P - m in Im X_m.
void NormalModes::to_modes(const Eigen::VectorXd& beads, Eigen::VectorXd& modes) const {
  const int P = beads_;
  real_ = beads;  // c2r/r2c inputs may be clobbered
  auto* X = reinterpret_cast<fftw_complex*>(spectrum_.data());
  fftw_execute_dft_r2c(plans_->forward, real_.data(), X);
  modes.resize(P);
  const double a = 1.0 / std::sqrt(static_cast<double>(P)), b = std::sqrt(2.0 / P);
  modes[0] = a * X[0][0];
  for (int m = 1; 2 * m < P; ++m) {
    modes[m] = b * X[m][0];
    modes[P - m] = b * X[m][1];
  }
  if (P % 2 == 0) modes[P / 2] = a * X[P / 2][0];
}

void NormalModes::to_beads(const Eigen::VectorXd& modes, Eigen::VectorXd& beads) const {
  const int P = beads_;
  auto* Y = reinterpret_cast<fftw_complex*>(spectrum_.data());
  const double a = 1.0 / std::sqrt(static_cast<double>(P)), b = 1.0 / std::sqrt(2.0 * P);
  Y[0][0] = a * modes[0];
  Y[0][1] = 0.0;
  for (int m = 1; 2 * m < P; ++m) {
    Y[m][0] = b * modes[m];
    Y[m][1] = b * modes[P - m];
  }
  if (P % 2 == 0) {
    Y[P / 2][0] = a * modes[P / 2];
    Y[P / 2][1] = 0.0;
  }
  beads.resize(P);
  fftw_execute_dft_c2r(plans_->backward, Y, beads.data());
}

Eigen::VectorXd NormalModes::to_modes(const Eigen::VectorXd& beads) const {
  Eigen::VectorXd out;
  to_modes(beads, out);
  return out;
}

Eigen::VectorXd NormalModes::to_beads(const Eigen::VectorXd& modes) const {
  Eigen::VectorXd out;
  to_beads(modes, out);
  return out;
}

double spring_constant(const model::PotentialSpec& pot, const model::SystemParams& sys, int P) {
  return pot.mass * P / (sys.beta * sys.beta * sys.hbar * sys.hbar);
}

double quasiparticle_potential(const model::PotentialSpec& pot, const model::SystemParams& sys, int P,
                               const Eigen::VectorXd& beads) {
  if (P < 2 || beads.size() != P) throw Error(ErrorCode::InvalidArgument, "bead vector must have P >= 2 entries");
  const double half_k = 0.5 * spring_constant(pot, sys, P);
  double phi = 0.0;
  for (int j = 0; j < P; ++j) {
    const double d = beads[j] - beads[(j + 1) % P];
    phi += half_k * d * d + model::eval_potential(pot, beads[j]) / P;
  }
  return phi;
}

double mode_frequency(const model::SystemParams& sys) { return 2.0 * 3.14159265358979323846 / (sys.beta * sys.hbar); }

namespace {

// Normal-mode velocity Verlet with massive NHC; the centroid mode is either
// frozen (constrained sampling) or propagated like the others.
class RingPolymerIntegrator {
 public:
  RingPolymerIntegrator(const model::PotentialSpec& pot, const model::SystemParams& sys, int P, double q_ref,
                        bool frozen_centroid, const SamplerConfig& cfg, std::uint64_t seed)
      : pot_(pot),
        modes_(P),
        first_(frozen_centroid ? 1 : 0),
        rng_(seed) {
    const double kT = sys.kT();
    const double omega = mode_frequency(sys);
    dt_ = cfg.step_fraction * 2.0 * 3.14159265358979323846 / omega;
    const double spring = spring_constant(pot, sys, P);
    const double kappa = std::max(model::eval_curvature(pot, q_ref), cfg.curvature_floor);
    stiffness_.resize(P);
    mass_.resize(P);
    for (int k = 0; k < P; ++k) {
      stiffness_[k] = spring * modes_.eigenvalue(k);
      mass_[k] = (stiffness_[k] + kappa / P) / (omega * omega);
    }
    rot_freq_ = (stiffness_.array() / mass_.array()).sqrt();
    rot_cos_ = (rot_freq_ * dt_).array().cos();
    rot_sin_ = (rot_freq_ * dt_).array().sin();
    u_ = Eigen::VectorXd::Zero(P);
    p_ = Eigen::VectorXd::Zero(P);
    u_[0] = std::sqrt(static_cast<double>(P)) * q_ref;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = first_; k < P; ++k) {
      if (k > 0) u_[k] = gauss(rng_) * std::sqrt(kT / (stiffness_[k] + kappa / P));
      p_[k] = gauss(rng_) * std::sqrt(mass_[k] * kT);
    }
    thermostat_.emplace(static_cast<std::size_t>(P - first_), cfg.chain_length, kT, omega, cfg.yoshida_order,
                        cfg.thermostat_substeps, rng_);
    active_mass_.assign(mass_.data() + first_, mass_.data() + P);
    refresh_forces();
  }

  void step() {
    const int P = modes_.beads();
    auto active_p = std::span<double>(p_.data() + first_, P - first_);
    thermostat_->propagate(active_p, active_mass_, 0.5 * dt_);
    for (int k = first_; k < P; ++k) p_[k] += 0.5 * dt_ * f_[k];
    free_ring_step();
    refresh_forces();
    for (int k = first_; k < P; ++k) p_[k] += 0.5 * dt_ * f_[k];
    thermostat_->propagate(active_p, active_mass_, 0.5 * dt_);
  }

  double conserved() const {
    double e = potential_;
    for (int k = first_; k < modes_.beads(); ++k) e += 0.5 * p_[k] * p_[k] / mass_[k];
    return e + thermostat_->energy();
  }

  const Eigen::VectorXd& beads() const { return q_; }
  double centroid_force() const { return bead_force_.mean(); }
  int active_dof() const { return modes_.beads() - first_; }

 private:
  // Springs are integrated exactly; only the external force is split.
  void free_ring_step() {
    for (int k = first_; k < modes_.beads(); ++k) {
      if (stiffness_[k] == 0.0) {
        u_[k] += dt_ * p_[k] / mass_[k];
        continue;
      }
      const double u = u_[k], p = p_[k];
      u_[k] = rot_cos_[k] * u + rot_sin_[k] * p / (mass_[k] * rot_freq_[k]);
      p_[k] = rot_cos_[k] * p - rot_sin_[k] * mass_[k] * rot_freq_[k] * u;
    }
  }

  void refresh_forces() {
    const int P = modes_.beads();
    modes_.to_beads(u_, q_);
    bead_force_.resize(P);
    double v_sum = 0.0;
    for (int j = 0; j < P; ++j) {
      bead_force_[j] = model::eval_force(pot_, q_[j]);
      v_sum += model::eval_potential(pot_, q_[j]);
    }
    modes_.to_modes(bead_force_, f_);
    f_ /= static_cast<double>(P);
    double spring = 0.0;
    for (int k = 0; k < P; ++k) spring += 0.5 * stiffness_[k] * u_[k] * u_[k];
    potential_ = spring + v_sum / P;
  }

  const model::PotentialSpec& pot_;
  NormalModes modes_;
  int first_;
  std::mt19937_64 rng_;
  double dt_ = 0.0;
  Eigen::VectorXd stiffness_, mass_, u_, p_, f_, q_, bead_force_;
  Eigen::VectorXd rot_freq_, rot_cos_, rot_sin_;
  std::vector<double> active_mass_;
  std::optional<ThermostatChains> thermostat_;
  double potential_ = 0.0;
};

// Mean extended energy over the first and last tenth of production.
class DriftMonitor {
 public:
  DriftMonitor(long n_steps, double scale) : n_(n_steps), window_(std::max(1L, n_steps / 10)), scale_(scale) {}

  void record(long step, double energy) {
    if (!std::isfinite(energy)) finite_ = false;
    if (step < window_) head_ += energy;
    if (step >= n_ - window_) tail_ += energy;
  }

  double relative_drift() const {
    if (!finite_) return std::numeric_limits<double>::infinity();
    return std::abs(tail_ - head_) / static_cast<double>(window_) / scale_;
  }

 private:
  long n_, window_;
  double scale_;
  double head_ = 0.0, tail_ = 0.0;
  bool finite_ = true;
};

void check_config(const SamplerConfig& cfg, int P) {
  if (P < 2) throw Error(ErrorCode::InvalidArgument, "Trotter number must be >= 2");
  if (cfg.production_steps < 64 || cfg.stride < 1 || cfg.equilibration_steps < 0 || !(cfg.step_fraction > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sampler needs >= 64 production steps, stride >= 1 and a positive step");
}

}  // namespace

MeanForce sample_constrained(const model::PotentialSpec& pot, const model::SystemParams& sys, int P, double q_c,
                             const SamplerConfig& cfg) {
  pot.validate();
  sys.validate();
  check_config(cfg, P);
  RingPolymerIntegrator md(pot, sys, P, q_c, true, cfg, cfg.seed);
  for (long s = 0; s < cfg.equilibration_steps; ++s) md.step();
  DriftMonitor drift(cfg.production_steps, md.active_dof() * sys.kT());
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(cfg.production_steps / cfg.stride));
  double max_constraint = 0.0;
  for (long s = 0; s < cfg.production_steps; ++s) {
    md.step();
    drift.record(s, md.conserved());
    if ((s + 1) % cfg.stride == 0) {
      samples.push_back(md.centroid_force());
      max_constraint = std::max(max_constraint, std::abs(md.beads().mean() - q_c));
    }
  }
  MeanForce out;
  out.q_c = q_c;
  out.conserved_drift = drift.relative_drift();
  out.max_constraint_error = max_constraint;
  if (!(out.conserved_drift <= cfg.drift_tolerance)) {
    std::ostringstream msg;
    msg << "extended energy drift " << out.conserved_drift << " exceeds " << cfg.drift_tolerance
        << "; reduce step_fraction";
    throw Error(ErrorCode::ThermostatDivergence, msg.str());
  }
  const auto est = stats::blocking_estimate(samples);
  out.force = est.mean;
  // Zero-variance estimators (harmonic V) still need a positive error bar.
  out.stderr_ = std::max(est.stderr_, 1e-12 * std::max(1.0, std::abs(est.mean)));
  out.n_samples = samples.size();
  return out;
}

void ForceTable::validate() const {
  const std::size_t n = q_c.size();
  if (force.size() != n || stderr_.size() != n || n_samples.size() != n)
    throw Error(ErrorCode::InvalidArgument, "force table columns differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(stderr_[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "force table standard errors must be positive");
    if (i > 0 && !(q_c[i] > q_c[i - 1])) throw Error(ErrorCode::InvalidArgument, "force table grid must ascend");
  }
}

ForceTable centroid_force_grid(const model::PotentialSpec& pot, const model::SystemParams& sys, int P,
                               const std::vector<double>& grid, const SamplerConfig& cfg, unsigned threads) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "centroid grid must be strictly ascending");
  std::vector<MeanForce> results(grid.size());
  std::vector<std::exception_ptr> failures(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        SamplerConfig local = cfg;
        local.seed = stats::derive_seed(cfg.seed, i);
        results[i] = sample_constrained(pot, sys, P, grid[i], local);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "at q_c = " + std::to_string(grid[i]) + ": " + e.what());
    }
  }
  ForceTable table;
  table.beta = sys.beta;
  table.P = P;
  table.seed = cfg.seed;
  for (const auto& r : results) {
    table.q_c.push_back(r.q_c);
    table.force.push_back(r.force);
    table.stderr_.push_back(r.stderr_);
    table.n_samples.push_back(r.n_samples);
  }
  return table;
}

UnconstrainedEstimate centroid_variance_estimate(const model::PotentialSpec& pot, const model::SystemParams& sys,
                                                 int P, const SamplerConfig& cfg) {
  pot.validate();
  sys.validate();
  check_config(cfg, P);
  const auto minima = model::classical_minima(pot);
  const double start = minima.empty() ? 0.0 : minima.back();
  RingPolymerIntegrator md(pot, sys, P, start, false, cfg, cfg.seed);
  for (long s = 0; s < cfg.equilibration_steps; ++s) md.step();
  DriftMonitor drift(cfg.production_steps, md.active_dof() * sys.kT());
  std::vector<double> centroid_sq, bead_sq;
  for (long s = 0; s < cfg.production_steps; ++s) {
    md.step();
    drift.record(s, md.conserved());
    if ((s + 1) % cfg.stride == 0) {
      const double c = md.beads().mean();
      centroid_sq.push_back(c * c);
      bead_sq.push_back(md.beads().squaredNorm() / P);
    }
  }
  UnconstrainedEstimate out;
  out.conserved_drift = drift.relative_drift();
  if (!(out.conserved_drift <= cfg.drift_tolerance))
    throw Error(ErrorCode::ThermostatDivergence, "extended energy drift exceeds tolerance; reduce step_fraction");
  out.centroid_sq = stats::blocking_estimate(centroid_sq);
  out.bead_sq = stats::blocking_estimate(bead_sq);
  return out;
}

}  // namespace qdyn::pimd
