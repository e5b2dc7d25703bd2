#include "doctest.h"

#include <cmath>
#include <random>

#include "qdyn/error.hpp"
#include "qdyn/nhc.hpp"
#include "qdyn/oracle.hpp"
#include "qdyn/pimd.hpp"

using namespace qdyn;

namespace {

Eigen::VectorXd random_path(int P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd q(P);
  for (int j = 0; j < P; ++j) q[j] = g(rng);
  return q;
}

// Bead-space spring energy from the cyclic Laplacian quadratic form.
double laplacian_form(const Eigen::VectorXd& q) {
  const int P = static_cast<int>(q.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(P, P);
  for (int j = 0; j < P; ++j) {
    L(j, j) += 2.0;
    L(j, (j + 1) % P) -= 1.0;
    L((j + 1) % P, j) -= 1.0;
  }
  return q.dot(L * q);
}

pimd::SamplerConfig quick_config(std::uint64_t seed = 1) {
  pimd::SamplerConfig cfg;
  cfg.seed = seed;
  cfg.equilibration_steps = 2000;
  cfg.production_steps = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("quasiparticle potential") {
  const auto dw = model::double_well();
  const auto sys = model::natural_units(1.0);

  SUBCASE("constant path gives V") {
    Eigen::VectorXd q = Eigen::VectorXd::Constant(6, 1.3);
    CHECK(pimd::quasiparticle_potential(dw, sys, 6, q) == doctest::Approx(model::eval_potential(dw, 1.3)));
  }
  SUBCASE("two beads count both springs") {
    Eigen::VectorXd q(2);
    q << 0.4, -0.7;
    const double expected = (2.0 / 2.0) * 2.0 * 1.1 * 1.1 +
                            0.5 * (model::eval_potential(dw, 0.4) + model::eval_potential(dw, -0.7));
    CHECK(pimd::quasiparticle_potential(dw, sys, 2, q) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("random path against direct summation") {
    const auto sys10 = model::natural_units(3.0);
    const auto q = random_path(8, 5);
    double naive = 0.0;
    for (int j = 0; j < 8; ++j) {
      const double next = j == 7 ? q[0] : q[j + 1];
      naive += (1.0 * 8 / (2.0 * 9.0)) * (q[j] - next) * (q[j] - next);
      naive += (-0.5 * q[j] * q[j] + 0.1 * std::pow(q[j], 4)) / 8.0;
    }
    CHECK(std::abs(pimd::quasiparticle_potential(dw, sys10, 8, q) - naive) < 1e-12);
  }
  CHECK_THROWS_AS(pimd::quasiparticle_potential(dw, sys, 1, Eigen::VectorXd::Zero(1)), Error);
}

TEST_CASE("normal-mode transform") {
  for (int P : {2, 5, 8, 33}) {
    CAPTURE(P);
    const pimd::NormalModes nm(P);
    CHECK((nm.basis().transpose() * nm.basis() - Eigen::MatrixXd::Identity(P, P)).cwiseAbs().maxCoeff() < 1e-12);

    const auto u = nm.to_modes(Eigen::VectorXd::Constant(P, 0.8));
    CHECK(u[0] == doctest::Approx(0.8 * std::sqrt(P)));
    CHECK(u.tail(P - 1).cwiseAbs().maxCoeff() < 1e-12);

    const auto q = random_path(P, 17 + P);
    CHECK((nm.to_beads(nm.to_modes(q)) - q).cwiseAbs().maxCoeff() < 1e-12);

    const auto modes = nm.to_modes(q);
    CHECK((modes - nm.basis().transpose() * q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((nm.to_beads(modes) - nm.basis() * modes).cwiseAbs().maxCoeff() < 1e-12);
    double mode_form = 0.0;
    for (int k = 0; k < P; ++k) mode_form += nm.eigenvalue(k) * modes[k] * modes[k];
    CHECK(mode_form == doctest::Approx(laplacian_form(q)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pimd::NormalModes(1), Error);
}

TEST_CASE("thermostat chains sample the canonical momentum distribution") {
  // Single harmonic oscillator with a massive chain: <p^2/m> -> kT, <m w^2 x^2> -> kT.
  const double kT = 0.7, m = 2.0, w = 1.3, dt = 0.05;
  std::mt19937_64 rng(3);
  pimd::ThermostatChains nhc(1, 4, kT, w, 3, 1, rng);
  double x = 1.0, p = 0.0;
  std::vector<double> mass{m};
  double kin = 0.0, pot = 0.0;
  double h0 = 0.0, hmax = 0.0;
  const long n = 400000;
  for (long s = 0; s < n; ++s) {
    nhc.propagate(std::span<double>(&p, 1), mass, 0.5 * dt);
    p -= 0.5 * dt * m * w * w * x;
    x += dt * p / m;
    p -= 0.5 * dt * m * w * w * x;
    nhc.propagate(std::span<double>(&p, 1), mass, 0.5 * dt);
    const double h = p * p / (2 * m) + 0.5 * m * w * w * x * x + nhc.energy();
    if (s == 0) h0 = h;
    hmax = std::max(hmax, std::abs(h - h0));
    kin += p * p / m;
    pot += m * w * w * x * x;
  }
  CHECK(kin / n == doctest::Approx(kT).epsilon(0.05));
  CHECK(pot / n == doctest::Approx(kT).epsilon(0.05));
  CHECK(hmax / kT < 0.05);
}

TEST_CASE("harmonic constrained mean force is exact") {
  const auto harm = model::harmonic(1.0, 1.0);
  const auto sys = model::natural_units(1.0);
  for (double qc : {-1.5, 0.0, 0.7}) {
    const auto r = pimd::sample_constrained(harm, sys, 16, qc, quick_config());
    CHECK(std::abs(r.force + qc) <= 3.0 * r.stderr_ + 1e-12);
    CHECK(r.max_constraint_error < 1e-10);
    CHECK(r.conserved_drift < 1e-4);
    CHECK(r.stderr_ > 0.0);
  }
}

TEST_CASE("double well constrained sampling") {
  const auto dw = model::double_well();
  const auto sys = model::natural_units(1.0);

  SUBCASE("parity at the origin") {
    const auto r = pimd::sample_constrained(dw, sys, 16, 0.0, quick_config(9));
    CHECK(std::abs(r.force) < 3.0 * r.stderr_);
    CHECK(r.max_constraint_error < 1e-10);
    CHECK(r.conserved_drift < 1e-4);
  }
  SUBCASE("deterministic given the seed") {
    const auto a = pimd::sample_constrained(dw, sys, 8, 0.9, quick_config(4));
    const auto b = pimd::sample_constrained(dw, sys, 8, 0.9, quick_config(4));
    CHECK(a.force == b.force);
    CHECK(a.stderr_ == b.stderr_);
  }
  SUBCASE("errors shrink as 1/sqrt(N)") {
    auto cfg = quick_config(21);
    cfg.production_steps = 16000;
    const auto short_run = pimd::sample_constrained(dw, sys, 8, 1.0, cfg);
    cfg.production_steps = 256000;
    const auto long_run = pimd::sample_constrained(dw, sys, 8, 1.0, cfg);
    const double ratio = short_run.stderr_ / long_run.stderr_;
    CHECK(ratio > 4.0 * 0.6);
    CHECK(ratio < 4.0 / 0.6);
    CHECK(std::abs(short_run.force - long_run.force) < 3.0 * std::hypot(short_run.stderr_, long_run.stderr_));
  }
  SUBCASE("divergence is reported") {
    auto cfg = quick_config();
    cfg.step_fraction = 0.9;
    try {
      pimd::sample_constrained(dw, sys, 8, 0.5, cfg);
      FAIL("expected ThermostatDivergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ThermostatDivergence);
    }
  }
}

TEST_CASE("extended energy is conserved over 1e5 steps at the test step size") {
  auto cfg = quick_config(5);
  cfg.production_steps = 100000;
  cfg.step_fraction = 0.005;
  const auto r = pimd::sample_constrained(model::double_well(), model::natural_units(1.0), 16, 0.5, cfg);
  CHECK(r.conserved_drift < 1e-4);
}

TEST_CASE("force grid on the harmonic oscillator") {
  const auto harm = model::harmonic(1.0, 1.0);
  const auto sys = model::natural_units(1.0);
  const auto grid = std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0};
  auto cfg = quick_config(77);
  cfg.production_steps = 4000;
  const auto one = pimd::centroid_force_grid(harm, sys, 8, grid, cfg, 1);
  const auto two = pimd::centroid_force_grid(harm, sys, 8, grid, cfg, 2);
  REQUIRE(one.size() == grid.size());
  one.validate();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(one.force[i] == two.force[i]);
    sxy += grid[i] * one.force[i];
    sxx += grid[i] * grid[i];
  }
  CHECK(sxy / sxx == doctest::Approx(-1.0).epsilon(0.02));
  CHECK_THROWS_AS(pimd::centroid_force_grid(harm, sys, 8, {1.0, 0.0}, cfg), Error);
}

TEST_CASE("harmonic bead fluctuations converge in P toward the quantum value") {
  const auto harm = model::harmonic(1.0, 1.0);
  const auto sys = model::natural_units(4.0);
  const double quantum = 0.5 / std::tanh(0.5 * 4.0);
  double previous_gap = 1e9;
  for (int P : {2, 4, 8, 16}) {
    CAPTURE(P);
    const double K = pimd::spring_constant(harm, sys, P);
    const pimd::NormalModes nm(P);
    double discrete = 0.0;
    for (int k = 0; k < P; ++k) discrete += sys.kT() / (K * nm.eigenvalue(k) + 1.0 / P);
    discrete /= P;
    auto cfg = quick_config(100 + P);
    cfg.production_steps = 200000;
    const auto est = pimd::centroid_variance_estimate(harm, sys, P, cfg);
    CHECK(std::abs(est.bead_sq.mean - discrete) < 4.0 * est.bead_sq.stderr_ + 1e-3);
    CHECK(std::abs(est.centroid_sq.mean - sys.kT()) < 4.0 * est.centroid_sq.stderr_ + 1e-3);
    const double gap = quantum - discrete;
    CHECK(gap > 0.0);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
}

TEST_CASE("double well centroid variance matches the canonical correlation at t = 0") {
  const auto dw = model::double_well();
  const auto sys = model::natural_units(10.0);
  const auto eig = oracle::solve_thermal_eigensystem(dw, sys, {-8.0, 8.0, 2001});
  const double exact = oracle::exact_canonical_correlation(eig, 10.0, {0.0}).values[0].real();
  auto cfg = quick_config(2024);
  cfg.equilibration_steps = 5000;
  cfg.production_steps = 200000;
  const auto est = pimd::centroid_variance_estimate(dw, sys, 64, cfg);
  CAPTURE(exact);
  CAPTURE(est.centroid_sq.mean);
  CAPTURE(est.centroid_sq.stderr_);
  CHECK(std::abs(est.centroid_sq.mean - exact) < 3.0 * est.centroid_sq.stderr_ + 2e-3);
}
