#include "qdyn/nhc.hpp"

#include <cmath>

#include "qdyn/error.hpp"

namespace qdyn::pimd {

ThermostatChains::ThermostatChains(std::size_t n_dof, int length, double kT, double frequency, int yoshida_order,
                                   int substeps, std::mt19937_64& rng)
    : n_dof_(n_dof), length_(length), kT_(kT), mass_(kT / (frequency * frequency)) {
  if (length < 2) throw Error(ErrorCode::InvalidArgument, "thermostat chains need length >= 2");
  if (!(frequency > 0.0) || !(kT > 0.0)) throw Error(ErrorCode::InvalidArgument, "thermostat needs kT, frequency > 0");
  if (substeps < 1) throw Error(ErrorCode::InvalidArgument, "thermostat substeps must be >= 1");
  std::vector<double> base;
  if (yoshida_order == 1) {
    base = {1.0};
  } else if (yoshida_order == 3) {
    const double w = 1.0 / (2.0 - std::cbrt(2.0));
    base = {w, 1.0 - 2.0 * w, w};
  } else {
    throw Error(ErrorCode::InvalidArgument, "Suzuki-Yoshida order must be 1 or 3");
  }
  for (int c = 0; c < substeps; ++c)
    for (double w : base) weights_.push_back(w / substeps);
  eta_.assign(n_dof * length, 0.0);
  vel_.resize(n_dof * length);
  std::normal_distribution<double> gauss(0.0, std::sqrt(kT / mass_));
  // drawn dof by dof so the sequence matches the chain order
  for (std::size_t i = 0; i < n_dof; ++i)
    for (int j = 0; j < length; ++j) vel_[j * n_dof + i] = gauss(rng);
  force_.resize(n_dof * length);
  decay_.resize(n_dof * length);
  ke2_.resize(n_dof);
  scale_.resize(n_dof);
}

void ThermostatChains::propagate(std::span<double> momenta, std::span<const double> masses, double dt) {
  const int M = length_;
  const std::size_t n = n_dof_;
  const double Q = mass_, kT = kT_;
  auto link = [n](std::vector<double>& v, int j) { return v.data() + j * n; };

  for (std::size_t i = 0; i < n; ++i) {
    ke2_[i] = momenta[i] * momenta[i] / masses[i];
    scale_[i] = 1.0;
  }
  {
    double* g0 = link(force_, 0);
    for (std::size_t i = 0; i < n; ++i) g0[i] = (ke2_[i] - kT) / Q;
    for (int j = 0; j + 1 < M; ++j) {
      const double* v = link(vel_, j);
      double* g = link(force_, j + 1);
      for (std::size_t i = 0; i < n; ++i) g[i] = (Q * v[i] * v[i] - kT) / Q;
    }
  }
  for (double w : weights_) {
    const double d = w * dt;
    {
      double* v = link(vel_, M - 1);
      const double* g = link(force_, M - 1);
      for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * d * g[i];
    }
    for (int j = M - 2; j >= 0; --j) {
      double* v = link(vel_, j);
      const double* up = link(vel_, j + 1);
      const double* g = link(force_, j);
      double* a = link(decay_, j);
      for (std::size_t i = 0; i < n; ++i) a[i] = std::exp(-0.25 * d * up[i]);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[i] * (a[i] * v[i] + 0.5 * d * g[i]);
    }
    {
      const double* v0 = link(vel_, 0);
      double* g0 = link(force_, 0);
      double* s = link(decay_, M - 1);
      for (std::size_t i = 0; i < n; ++i) s[i] = std::exp(-d * v0[i]);
      for (std::size_t i = 0; i < n; ++i) {
        scale_[i] *= s[i];
        ke2_[i] *= s[i] * s[i];
        g0[i] = (ke2_[i] - kT) / Q;
      }
    }
    for (int j = 0; j < M; ++j) {
      double* e = link(eta_, j);
      const double* v = link(vel_, j);
      for (std::size_t i = 0; i < n; ++i) e[i] += d * v[i];
    }
    // v[j + 1] is untouched since the downward sweep, so the decay factors are reused
    for (int j = 0; j + 1 < M; ++j) {
      double* v = link(vel_, j);
      const double* a = link(decay_, j);
      const double* g = link(force_, j);
      double* g_up = link(force_, j + 1);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = a[i] * (a[i] * v[i] + 0.5 * d * g[i]);
        g_up[i] = (Q * v[i] * v[i] - kT) / Q;
      }
    }
    {
      double* v = link(vel_, M - 1);
      const double* g = link(force_, M - 1);
      for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * d * g[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) momenta[i] *= scale_[i];
}

double ThermostatChains::energy() const {
  double e = 0.0;
  for (std::size_t k = 0; k < vel_.size(); ++k) e += 0.5 * mass_ * vel_[k] * vel_[k] + kT_ * eta_[k];
  return e;
}

}  // namespace qdyn::pimd
