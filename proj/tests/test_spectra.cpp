#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdyn/epac.hpp"
#include "qdyn/error.hpp"
#include "qdyn/oracle.hpp"
#include "qdyn/series.hpp"
#include "qdyn/spectra.hpp"

using namespace qdyn;
using spectra::Window;

namespace {

CorrelationSeries sampled(double dt, std::size_t n, auto&& f) {
  CorrelationSeries s;
  for (std::size_t k = 0; k < n; ++k) {
    s.times.push_back(k * dt);
    s.values.push_back(f(k * dt));
  }
  return s;
}

// series built from lines: C(t) = (1 / 2 pi) sum_l w_l exp(-i omega_l t)
CorrelationSeries from_lines(const SpectralLines& lines, double dt, std::size_t n) {
  return sampled(dt, n, [&](double t) {
    cplx c = 0.0;
    for (const auto& l : lines.lines) c += l.weight / (2.0 * std::numbers::pi) * std::exp(cplx(0.0, -l.omega * t));
    return c;
  });
}

}  // namespace

TEST_CASE("Kubo factor limits and identities") {
  CHECK(spectra::kubo_factor(0.0, 3.0) == 1.0);
  CHECK(spectra::kubo_factor(50.0, 2.0) == doctest::Approx(100.0).epsilon(1e-12));
  for (double w : {1e-9, 1e-3, 0.4, 2.5, 9.0}) {
    for (double beta : {0.1, 1.0, 10.0}) {
      CHECK(spectra::kubo_factor(w, beta) - spectra::kubo_factor(-w, beta) == doctest::Approx(beta * w).epsilon(1e-9));
      CHECK(spectra::kubo_factor(-w, beta) ==
            doctest::Approx(spectra::kubo_factor(w, beta) * std::exp(-beta * w)).epsilon(1e-12));
    }
  }
  // the series branch agrees with the closed form where both are accurate
  for (double x : {1e-7, 5e-7, 0.99e-6}) CHECK(spectra::kubo_factor(x, 1.0) == doctest::Approx(x / -std::expm1(-x)).epsilon(1e-12));
  CHECK(spectra::kubo_factor(1.0, 2.0, 0.5) == doctest::Approx(spectra::kubo_factor(1.0, 1.0)));
}

TEST_CASE("oracle canonical lines times E(omega) give the standard lines") {
  const model::PotentialSpec dw = model::double_well();
  for (double beta : {1.0, 10.0}) {
    const auto eig = oracle::solve_thermal_eigensystem(dw, model::natural_units(beta), {});
    const auto standard = oracle::exact_spectrum(eig, beta);
    const auto converted = spectra::canonical_to_standard(oracle::exact_canonical_spectrum(eig, beta));
    CHECK(converted.kind == LineKind::Standard);
    std::size_t matched = 0;
    for (const auto& l : standard.lines) {
      const auto it = std::find_if(converted.lines.begin(), converted.lines.end(),
                                   [&](const SpectralLine& c) { return c.omega == l.omega; });
      if (it == converted.lines.end()) {
        // its canonical partner fell below the oracle's line cutoff
        CHECK(l.weight / spectra::kubo_factor(l.omega, beta) < 1e-12);
        continue;
      }
      ++matched;
      CHECK(std::abs(it->weight - l.weight) <= 1e-8 * std::max(1.0, l.weight));
    }
    CHECK(matched > 4);
  }
}

TEST_CASE("E(omega) leaves the zero line alone and amplifies higher frequencies") {
  SpectralLines can;
  can.kind = LineKind::Canonical;
  can.beta = 2.0;
  can.lines = {{0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}, {2.0, 1.0}, {4.0, 1.0}};
  const auto st = spectra::canonical_to_standard(can);
  CHECK(st.lines[0].weight == 1.0);
  for (std::size_t i = 1; i < st.lines.size(); ++i) CHECK(st.lines[i].weight > st.lines[i - 1].weight);
}

TEST_CASE("Hann transform of a cosine") {
  const double A = 0.7, w0 = 1.3, dt = 0.05;
  const auto s = sampled(dt, 4001, [&](double t) { return cplx(A * std::cos(w0 * t), 0.0); });
  const auto spec = spectra::fourier_transform_series(s, Window::Hann);
  CHECK(spec.n == 2 * 4001 - 1);
  CHECK(spec.spacing() == doctest::Approx(2.0 * std::numbers::pi / (spec.n * dt)));
  CHECK(spec.omega.back() <= std::numbers::pi / dt + 1e-12);  // Nyquist
  const auto peaks = spectra::extract_peaks(spec, 0.1 * A * 200.0);
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[1].omega - w0) < 0.5 * spec.spacing());
  CHECK(std::abs(peaks[0].omega + w0) < 0.5 * spec.spacing());
  const cplx weight = spectra::integrated_weight(spec, w0, 0.3);
  CHECK(weight.real() == doctest::Approx(A * std::numbers::pi).epsilon(0.02));
  // real even input gives a Hermitian (here real) spectrum
  const std::size_t n = spec.omega.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(spec.omega[i] == doctest::Approx(-spec.omega[n - 1 - i]));
    CHECK(std::abs(spec.values[i] - std::conj(spec.values[n - 1 - i])) < 1e-10);
  }
}

TEST_CASE("EPAC series transform reproduces the EPAC lines") {
  const epac::EpacParameters p{.omega_beta = 0.8, .beta = 1.5};
  const auto series = epac::epac_correlation(p, linspace(0.0, 400.0, 8001));
  const auto spec = spectra::fourier_transform_series(series, Window::Hann);
  const auto lines = epac::epac_spectrum(p);
  for (const auto& l : lines.lines) {
    const cplx w = spectra::integrated_weight(spec, l.omega, 0.2);
    CHECK(std::abs(w.real() - l.weight) < 0.01 * l.weight);
    CHECK(std::abs(w.imag()) < 1e-8);
  }
  const auto peaks = spectra::extract_peaks(spec, 20.0);  // above the Hann side lobes
  REQUIRE(peaks.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(peaks[i].omega - lines.lines[i].omega) < spec.spacing());
}

TEST_CASE("Plancherel holds for a windowed decaying signal") {
  const double dt = 0.02;
  const auto s = sampled(dt, 3000, [](double t) { return cplx(std::exp(-0.1 * t) * std::cos(2.0 * t), -0.3 * std::exp(-0.2 * t) * std::sin(t)); });
  for (int pad : {1, 2}) {
    const auto spec = spectra::fourier_transform_series(s, Window::Hann, pad);
    double freq_power = 0.0, time_power = 0.0;
    for (const auto& v : spec.values) freq_power += std::norm(v);
    freq_power *= spec.spacing() / (2.0 * std::numbers::pi);
    const double T = s.times.back() + dt;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double c = std::cos(std::numbers::pi * s.times[k] / (2.0 * T));
      time_power += (k == 0 ? 1.0 : 2.0) * std::norm(c * c * s.values[k]);
    }
    time_power *= dt;
    CHECK(freq_power == doctest::Approx(time_power).epsilon(1e-3));
  }
}

TEST_CASE("transform is linear and peak positions do not depend on the window") {
  const double dt = 0.1;
  auto f = [](double t) { return cplx(std::cos(0.9 * t), 0.0); };
  auto g = [](double t) { return cplx(0.5 * std::cos(2.1 * t), 0.0); };
  const auto sf = spectra::fourier_transform_series(sampled(dt, 2000, f));
  const auto sg = spectra::fourier_transform_series(sampled(dt, 2000, g));
  const auto sum = spectra::fourier_transform_series(sampled(dt, 2000, [&](double t) { return 2.0 * f(t) - 3.0 * g(t); }));
  for (std::size_t i = 0; i < sum.values.size(); ++i)
    CHECK(std::abs(sum.values[i] - (2.0 * sf.values[i] - 3.0 * sg.values[i])) < 1e-9);

  const auto hann = spectra::extract_peaks(sf, 10.0);
  const auto rect = spectra::extract_peaks(spectra::fourier_transform_series(sampled(dt, 2000, f), Window::Rectangular), 10.0);
  REQUIRE(hann.size() == 2);
  REQUIRE(rect.size() >= 2);
  const auto top = *std::max_element(rect.begin(), rect.end(), [](auto& a, auto& b) { return a.height < b.height; });
  CHECK(std::abs(std::abs(top.omega) - hann[1].omega) < sf.spacing());
}

TEST_CASE("E(omega) commutes with the transform on a commensurate oracle series") {
  const double beta = 2.0, dt = 0.1;
  const std::size_t N = 1000, n = 2 * N - 1;
  // harmonic lines at +-1 placed on the frequency grid: w = 2 pi K / (n dt') with K integer
  const double K = std::round(1.0 * n * dt / (2.0 * std::numbers::pi));
  const double step = 2.0 * std::numbers::pi * K / (n * 1.0);
  const auto eig = oracle::solve_thermal_eigensystem(model::harmonic(), model::natural_units(beta), {-12.0, 12.0, 3001});
  auto canonical = oracle::exact_canonical_spectrum(eig, beta);
  for (auto& l : canonical.lines) l.omega = std::round(l.omega);  // exact harmonic frequencies
  const auto standard = spectra::canonical_to_standard(canonical);
  const auto a = spectra::canonical_to_standard(
      spectra::fourier_transform_series(from_lines(canonical, step, N), Window::Rectangular), beta);
  const auto b = spectra::fourier_transform_series(from_lines(standard, step, N), Window::Rectangular);
  double scale = 0.0;
  for (const auto& v : b.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-6 * scale);
}

TEST_CASE("peak extraction edge cases") {
  spectra::SpectrumEstimate flat;
  flat.omega = linspace(-1.0, 1.0, 101);
  flat.values.assign(101, cplx(2.0, 0.0));
  CHECK(spectra::extract_peaks(flat, 0.5).empty());
  CHECK_THROWS_AS(spectra::extract_peaks(flat, 0.0), Error);

  const double w0 = 0.77, dt = 0.05;
  const auto spec = spectra::fourier_transform_series(sampled(dt, 3000, [&](double t) { return cplx(std::cos(w0 * t), 0.0); }));
  const auto peaks = spectra::extract_peaks(spec, 5.0);
  std::vector<spectra::Peak> positive;
  for (const auto& p : peaks)
    if (p.omega > 0.0) positive.push_back(p);
  REQUIRE(positive.size() == 1);
  CHECK(std::abs(positive[0].omega - w0) < 0.5 * spec.spacing());
  CHECK(positive[0].width > 0.0);
  CHECK(positive[0].width < 6.0 * spec.spacing());
}

TEST_CASE("double-well canonical spectrum peaks at the first transition") {
  const double beta = 10.0;
  const auto eig = oracle::solve_thermal_eigensystem(model::double_well(), model::natural_units(beta), {});
  const auto t = linspace(0.0, 300.0, 6001);
  const auto spec = spectra::fourier_transform_series(oracle::exact_canonical_correlation(eig, beta, t));
  std::vector<spectra::Peak> peaks;
  for (const auto& p : spectra::extract_peaks(spec, 1e-3))
    if (p.omega > 0.0) peaks.push_back(p);
  REQUIRE(!peaks.empty());
  const auto top = *std::max_element(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.height < b.height; });
  CHECK(std::abs(top.omega - (eig.energies[1] - eig.energies[0])) < spec.spacing());
}

TEST_CASE("transform preconditions") {
  CorrelationSeries s;
  s.times = {0.0, 0.1, 0.25};
  s.values = {1.0, 0.5, 0.1};
  CHECK_THROWS_AS(spectra::fourier_transform_series(s), Error);
  s.times = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(spectra::fourier_transform_series(s), Error);
  CHECK(spectra::window_from_string("hann") == Window::Hann);
  CHECK_THROWS_AS(spectra::window_from_string("blackman"), Error);
}
