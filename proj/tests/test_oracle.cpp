#include <chrono>
#include <cmath>

#include "doctest.h"
#include "qdyn/error.hpp"
#include "qdyn/oracle.hpp"

using namespace qdyn;
using namespace qdyn::oracle;

namespace {

const GridSpec kDefaultGrid{-8.0, 8.0, 2001};
// The harmonic well needs E ~ 30 states at beta = 1, whose turning points exceed |q| = 8.
const GridSpec kWideGrid{-12.0, 12.0, 3001};

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

TEST_CASE("harmonic spectrum on the default grid") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto eig = solve_eigensystem(model::harmonic(), model::natural_units(1.0), kDefaultGrid, 10);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (int n = 0; n < 10; ++n) CHECK(std::abs(eig.energies[n] - (n + 0.5)) < 1e-6);
  CHECK(std::abs(std::abs(eig.q_elements(0, 1)) - 1.0 / std::sqrt(2.0)) < 1e-6);
  CHECK(seconds < 5.0);
}

TEST_CASE("eigensystem invariants") {
  const auto eig = solve_eigensystem(model::double_well(), model::natural_units(1.0), kDefaultGrid, 12);
  const double h = kDefaultGrid.spacing();
  const Eigen::MatrixXd overlap = eig.wavefunctions.transpose() * eig.wavefunctions * h;
  CHECK((overlap - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((eig.q_elements - eig.q_elements.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  for (int m = 0; m < 12; ++m)
    for (int n = 0; n < 12; ++n)
      if ((m + n) % 2 == 0) CHECK(std::abs(eig.q_elements(m, n)) < 1e-8);
  for (int n = 1; n < 12; ++n) CHECK(eig.energies[n] > eig.energies[n - 1]);
}

TEST_CASE("three-point stencil converges at second order") {
  auto error_at = [](int n_points) {
    const auto eig = solve_eigensystem(model::harmonic(), model::natural_units(1.0), GridSpec{-8.0, 8.0, n_points}, 1,
                                       Stencil::ThreePoint);
    return std::abs(eig.energies[0] - 0.5);
  };
  const double coarse = error_at(401);
  const double fine = error_at(801);
  CHECK(coarse / fine >= 3.5);
}

TEST_CASE("stencils agree on the double well") {
  const auto five = solve_eigensystem(model::double_well(), model::natural_units(1.0), kDefaultGrid, 8);
  // Independent route: three-point stencil on two fine grids, Richardson-extrapolated in h^2.
  const auto three = solve_eigensystem(model::double_well(), model::natural_units(1.0), GridSpec{-8.0, 8.0, 16001}, 8,
                                       Stencil::ThreePoint);
  const auto three_coarse = solve_eigensystem(model::double_well(), model::natural_units(1.0),
                                              GridSpec{-8.0, 8.0, 8001}, 8, Stencil::ThreePoint);
  for (int n = 0; n < 8; ++n) {
    const double extrapolated = (4.0 * three.energies[n] - three_coarse.energies[n]) / 3.0;
    CHECK(std::abs(five.energies[n] - extrapolated) < 1e-6);
  }
  for (int m = 0; m < 8; ++m)
    for (int n = 0; n < 8; ++n)
      CHECK(std::abs(std::abs(five.q_elements(m, n)) - std::abs(three.q_elements(m, n))) < 1e-6);
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(solve_eigensystem(model::double_well(), model::natural_units(1.0), GridSpec{-2.0, 2.0, 401}, 4),
                  Error);
  try {
    solve_eigensystem(model::double_well(), model::natural_units(1.0), GridSpec{-2.0, 2.0, 401}, 4);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryLeak);
  }
  try {
    solve_eigensystem(model::harmonic(), model::natural_units(1.0), GridSpec{-8.0, 8.0, 41}, 30);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
  CHECK_THROWS(GridSpec{1.0, -1.0, 100}.validate());
  CHECK_THROWS(GridSpec{-1.0, 1.0, 8}.validate());
  const auto few = solve_eigensystem(model::double_well(), model::natural_units(1.0), kDefaultGrid, 4);
  try {
    exact_correlation(few, 1.0, {0.0});
    FAIL("expected TruncationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationError);
  }
}

TEST_CASE("harmonic correlation functions in closed form") {
  const double beta = 1.0;
  const auto eig = solve_thermal_eigensystem(model::harmonic(), model::natural_units(beta), kWideGrid);
  const std::vector<double> times = linspace(0.0, 20.0, 201);
  const auto c = exact_correlation(eig, beta, times);
  const auto can = exact_canonical_correlation(eig, beta, times);
  const auto zero = zero_temperature_correlation(eig, times);
  CHECK(c.values[0].real() == doctest::Approx(0.5 * coth(0.5)).epsilon(1e-7));
  CHECK(std::abs(c.values[0].imag()) < 1e-12);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const cplx expected(0.5 * coth(0.5 * beta) * std::cos(t), -0.5 * std::sin(t));
    CHECK(std::abs(c.values[i] - expected) < 1e-6);
    // Kubo transform of a harmonic oscillator: (1 / beta m w^2) cos(w t).
    CHECK(std::abs(can.values[i] - cplx(std::cos(t) / beta, 0.0)) < 1e-6);
    CHECK(std::abs(can.values[i].imag()) < 1e-10);
    CHECK(std::abs(zero.values[i] - 0.5 * std::exp(cplx(0.0, -t))) < 1e-6);
  }
}

TEST_CASE("canonical weights and diagonal limit") {
  CHECK(kubo_weight(3.0, 0.0) == 1.0);
  CHECK(kubo_weight(1.0, 1e-9) == doctest::Approx(1.0 - 0.5e-9).epsilon(1e-15));
  CHECK(kubo_weight(1.0, 2.0) == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-14));
}

TEST_CASE("zero temperature t=0 equals ground-state <q^2>") {
  const auto eig = solve_eigensystem(model::double_well(), model::natural_units(1.0), kDefaultGrid, 30);
  const auto zero = zero_temperature_correlation(eig, {0.0});
  const double h = kDefaultGrid.spacing();
  double q2 = 0.0;
  for (int i = 0; i < kDefaultGrid.n_points; ++i) {
    const double q = kDefaultGrid.point(i);
    q2 += eig.wavefunctions(i, 0) * eig.wavefunctions(i, 0) * q * q * h;
  }
  CHECK(zero.values[0].real() == doctest::Approx(q2).epsilon(1e-8));
}

TEST_CASE("spectral line identities") {
  for (double beta : {1.0, 10.0}) {
    const auto eig = solve_thermal_eigensystem(model::double_well(), model::natural_units(beta), kDefaultGrid);
    const auto lines = exact_spectrum(eig, beta);
    const auto can = exact_canonical_spectrum(eig, beta);
    // The canonical spectrum drops lines below 1e-12 after division; compare on the common support.
    std::size_t j = 0;
    double total = 0.0;
    for (const auto& line : lines.lines) {
      total += line.weight;
      if (j < can.lines.size() && can.lines[j].omega == line.omega) {
        const double y = beta * line.omega;
        const double e = (y == 0.0) ? 1.0 : y / -std::expm1(-y);
        CHECK(std::abs(line.weight - e * can.lines[j].weight) < 1e-8);
        ++j;
      }
    }
    // Parseval-type consistency with the time-domain value at t = 0.
    const auto c0 = exact_correlation(eig, beta, {0.0});
    CHECK(std::abs(total / (2.0 * M_PI) - c0.values[0].real()) < 1e-8);
    // Detailed balance between each pair of lines at +/- omega.
    for (const auto& a : lines.lines) {
      if (a.omega <= 0.0) continue;
      for (const auto& b : lines.lines) {
        if (std::abs(b.omega + a.omega) < 1e-12 && b.weight > 1e-8 * a.weight) {
          CHECK(std::abs(b.weight / a.weight - std::exp(-beta * a.omega)) < 1e-10);
        }
      }
    }
  }
  const auto heig = solve_thermal_eigensystem(model::harmonic(), model::natural_units(1.0), kWideGrid);
  for (const auto& line : exact_spectrum(heig, 1.0).lines) CHECK(std::abs(std::abs(line.omega) - 1.0) < 1e-6);
}

TEST_CASE("double well beta=10 dominant line is the 0 -> 1 transition") {
  const auto eig = solve_thermal_eigensystem(model::double_well(), model::natural_units(10.0), kDefaultGrid);
  const auto lines = exact_spectrum(eig, 10.0);
  SpectralLine best;
  for (const auto& l : lines.lines)
    if (l.weight > best.weight) best = l;
  CHECK(best.omega == doctest::Approx(eig.energies[1] - eig.energies[0]).epsilon(1e-12));
}

TEST_CASE("tilted generating function") {
  const auto sys = model::natural_units(1.0);
  const GridSpec grid = kWideGrid;
  const double w0 = tilted_generating_function(model::harmonic(), sys, grid, 0.0);
  for (double J : {0.5, 1.0, 2.0}) {
    const double wj = tilted_generating_function(model::harmonic(), sys, grid, J);
    CHECK(std::abs(wj - w0 - 0.5 * J * J) < 1e-8);
  }
  const auto dw = model::double_well();
  for (double J : {0.3, 1.7}) {
    const double plus = tilted_generating_function(dw, sys, kDefaultGrid, J);
    const double minus = tilted_generating_function(dw, sys, kDefaultGrid, -J);
    CHECK(std::abs(plus - minus) < 1e-10);
  }
  const double d = 1e-3;
  const double slope = (tilted_generating_function(dw, sys, kDefaultGrid, d) -
                        tilted_generating_function(dw, sys, kDefaultGrid, -d)) / (2 * d);
  CHECK(std::abs(slope) < 1e-8);
  try {
    tilted_generating_function(model::harmonic(), sys, GridSpec{-2.0, 2.0, 401}, 5.0);
    FAIL("expected BoundaryLeak");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryLeak);
  }
}
