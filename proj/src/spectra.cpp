#include "qdyn/spectra.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "qdyn/error.hpp"

namespace qdyn::spectra {

double kubo_factor(double omega, double beta, double hbar) noexcept {
  const double x = beta * hbar * omega;
  if (x == 0.0) return 1.0;
  if (std::abs(x) < 1e-6) return 1.0 + x / 2.0 + x * x / 12.0;
  return x / -std::expm1(-x);
}

std::string_view to_string(Window w) noexcept { return w == Window::Hann ? "hann" : "rectangular"; }

Window window_from_string(std::string_view name) {
  if (name == "hann") return Window::Hann;
  if (name == "rectangular") return Window::Rectangular;
  throw Error(ErrorCode::InvalidArgument, "unknown window '" + std::string(name) + "'");
}

SpectralLines canonical_to_standard(const SpectralLines& canonical) {
  SpectralLines out = canonical;
  out.kind = LineKind::Standard;
  for (auto& l : out.lines) l.weight *= kubo_factor(l.omega, canonical.beta);
  return out;
}

SpectrumEstimate canonical_to_standard(const SpectrumEstimate& canonical, double beta) {
  SpectrumEstimate out = canonical;
  out.beta = beta;
  for (std::size_t i = 0; i < out.omega.size(); ++i) out.values[i] *= kubo_factor(out.omega[i], beta);
  return out;
}

SpectrumEstimate fourier_transform_series(const CorrelationSeries& series, Window window, int padding) {
  const std::size_t N = series.size();
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "transform needs at least two samples");
  if (padding < 1) throw Error(ErrorCode::InvalidArgument, "padding must be >= 1");
  if (std::abs(series.times.front()) > 1e-12) throw Error(ErrorCode::NonuniformGrid, "series must start at t = 0");
  const double dt = series.uniform_step();
  const double t_max = series.times.back();
  const std::size_t n = static_cast<std::size_t>(padding) * (2 * N - 1);

  auto weight = [&](std::size_t k) {
    if (window == Window::Rectangular) return 1.0;
    const double c = std::cos(std::numbers::pi * k * dt / (2.0 * (t_max + dt)));
    return c * c;
  };
  std::vector<fftw_complex> buf(n);
  for (auto& z : buf) z[0] = z[1] = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const cplx v = weight(k) * series.values[k];
    buf[k][0] = v.real();
    buf[k][1] = v.imag();
    if (k > 0) {
      buf[n - k][0] = v.real();
      buf[n - k][1] = -v.imag();
    }
  }
  {
    // planning is not thread-safe; execution on a private plan is
    static std::mutex planner;
    fftw_plan plan;
    {
      std::lock_guard lock(planner);
      plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data(), buf.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner);
    fftw_destroy_plan(plan);
  }
  SpectrumEstimate out;
  out.window = window;
  out.dt = dt;
  out.t_max = t_max;
  out.n = n;
  out.beta = series.beta;
  out.source = series.kind;
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  const long lo = -static_cast<long>((n - 1) / 2), hi = static_cast<long>(n / 2);
  for (long m = lo; m <= hi; ++m) {
    const std::size_t j = static_cast<std::size_t>((m + static_cast<long>(n)) % static_cast<long>(n));
    out.omega.push_back(m * dw);
    out.values.emplace_back(dt * buf[j][0], dt * buf[j][1]);
  }
  return out;
}

cplx integrated_weight(const SpectrumEstimate& spec, double center, double half_width) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < spec.omega.size(); ++i)
    if (std::abs(spec.omega[i] - center) <= half_width) acc += spec.values[i];
  return acc * spec.spacing();
}

std::vector<Peak> extract_peaks(const SpectrumEstimate& spec, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "peak threshold must be positive");
  std::vector<Peak> peaks;
  const std::size_t n = spec.omega.size();
  auto y = [&](std::size_t i) { return spec.values[i].real(); };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y(i) > y(i - 1) && y(i) > y(i + 1) && y(i) > threshold)) continue;
    const double a = y(i - 1), b = y(i), c = y(i + 1);
    const double denom = a - 2.0 * b + c;
    const double delta = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    Peak p;
    p.omega = spec.omega[i] + delta * spec.spacing();
    p.height = b - 0.25 * (a - c) * delta;
    const double half = 0.5 * p.height;
    auto crossing = [&](int dir) {
      std::size_t j = i;
      while (j > 0 && j + 1 < n && y(j) > half) j = dir > 0 ? j + 1 : j - 1;
      if (y(j) > half) return spec.omega[j];
      const std::size_t k = dir > 0 ? j - 1 : j + 1;  // last point above half
      const double frac = (y(k) - half) / (y(k) - y(j));
      return spec.omega[k] + frac * (spec.omega[j] - spec.omega[k]);
    };
    p.width = crossing(+1) - crossing(-1);
    peaks.push_back(p);
  }
  return peaks;
}

}  // namespace qdyn::spectra
