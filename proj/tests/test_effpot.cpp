#include "doctest.h"

#include <cmath>
#include <random>

#include "qdyn/effpot.hpp"
#include "qdyn/error.hpp"
#include "qdyn/model.hpp"
#include "qdyn/pimd.hpp"
#include "qdyn/series.hpp"

using namespace qdyn;
using namespace qdyn::effpot;

namespace {

pimd::ForceTable synthetic_table(double (*force)(double), const std::vector<double>& grid, double noise, double beta,
                                 std::uint64_t seed) {
  pimd::ForceTable t;
  t.beta = beta;
  t.P = 1;
  t.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  for (double q : grid) {
    t.q_c.push_back(q);
    t.force.push_back(force(q) + g(rng));
    t.stderr_.push_back(noise);
    t.n_samples.push_back(1000);
  }
  return t;
}

double linear_force(double q) { return -q; }
double double_well_force(double q) { return q - 0.4 * q * q * q; }

int expect_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  }
  return -1;
}

}  // namespace

TEST_CASE("degree-1 fit of sampled harmonic forces has slope -m omega^2") {
  pimd::SamplerConfig cfg;
  cfg.equilibration_steps = 2000;
  cfg.production_steps = 20000;
  const auto grid = linspace(-2.0, 2.0, 9);
  const auto table = pimd::centroid_force_grid(model::harmonic(1.0, 1.3), model::natural_units(2.0), 8, grid, cfg, 1);
  const auto fit = fit_force_polynomial(table, 1, true);
  const double slope = fit.force.derivative()(0.3);
  CHECK(slope == doctest::Approx(-1.69).epsilon(0.02));
}

TEST_CASE("symmetric fits keep only odd Chebyshev terms") {
  const auto t = synthetic_table(double_well_force, linspace(-2.5, 2.5, 21), 1e-3, 1.0, 3);
  const auto fit = fit_force_polynomial(t, 9, true);
  const auto& c = fit.force.coefficients();
  REQUIRE(c.size() == 10);
  for (std::size_t k = 0; k < c.size(); k += 2) CHECK(c[k] == 0.0);
  CHECK(fit.symmetric);
  CHECK(fit.chi2_per_dof() < 3.0);
  for (double q : {-2.0, -0.7, 0.4, 1.9}) CHECK(fit.force(q) == doctest::Approx(double_well_force(q)).epsilon(1e-2));

  const auto general = fit_force_polynomial(t, 9, false);
  CHECK(general.force.coefficients().size() == 10);
  CHECK(general.dof == 21 - 10);
}

TEST_CASE("fit preconditions and ill-conditioning") {
  const auto t = synthetic_table(linear_force, linspace(-1.0, 1.0, 6), 1e-3, 1.0, 5);
  CHECK(expect_code([&] { fit_force_polynomial(t, 6, false); }) == static_cast<int>(ErrorCode::InvalidArgument));
  CHECK(expect_code([&] { fit_force_polynomial(t, 0, false); }) == static_cast<int>(ErrorCode::InvalidArgument));

  // nearly all points crowded at one end leave the high modes undetermined
  std::vector<double> grid{-1.0};
  for (int i = 0; i < 29; ++i) grid.push_back(0.999 + 1e-3 * i / 28.0);
  const auto crowded = synthetic_table(linear_force, grid, 1e-3, 1.0, 5);
  CHECK(expect_code([&] { fit_force_polynomial(crowded, 20, false); }) ==
        static_cast<int>(ErrorCode::IllConditioned));
}

TEST_CASE("integrating F = -q gives q^2 / 2 anchored at zero") {
  const ChebyshevSeries force(-2.0, 2.0, {0.0, -2.0});  // -2 u = -q
  const auto grid = linspace(-3.0, 3.0, 13);
  const auto ecp = integrate_to_ecp(force, 0.0, 1.0, grid);
  CHECK(ecp.kind == CurveKind::Classical);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(ecp.values[i] == doctest::Approx(0.5 * grid[i] * grid[i]));
  CHECK(ecp(0.0) == 0.0);
  CHECK(ecp(1.25) == doctest::Approx(0.78125));

  const auto shifted = integrate_to_ecp(force, 1.0, 1.0, grid);
  CHECK(shifted(1.0) == 0.0);
  CHECK(shifted(0.0) == doctest::Approx(-0.5));
}

TEST_CASE("generating function of a harmonic ECP is J^2 / 2 m omega^2") {
  const double k = 4.0;  // m omega^2
  const ChebyshevSeries force(-6.0, 6.0, {0.0, -6.0 * k});  // window wide against the thermal spread
  for (double beta : {0.5, 1.0, 10.0}) {
    const auto ecp = integrate_to_ecp(force, 0.0, beta, linspace(-6.0, 6.0, 7));
    const auto J = linspace(-4.0, 4.0, 33);
    const auto w = generating_function_from_ecp(ecp, J);
    for (std::size_t i = 0; i < J.size(); ++i) CHECK(w.w[i] == doctest::Approx(J[i] * J[i] / (2.0 * k)).epsilon(1e-9));
    for (std::size_t i = 0; i < J.size(); ++i) CHECK(w.w[i] == doctest::Approx(w.w[J.size() - 1 - i]).epsilon(1e-10));
    CHECK_FALSE(w.extrapolation_flag);
  }
}

TEST_CASE("double-well generating function is convex") {
  const auto t = synthetic_table(double_well_force, linspace(-2.5, 2.5, 21), 1e-4, 1.0, 9);
  const auto fit = fit_force_polynomial(t, 5, true);
  const auto ecp = integrate_to_ecp(fit.force, 0.0, 1.0, linspace(-2.5, 2.5, 51));
  const auto w = generating_function_from_ecp(ecp, linspace(-2.0, 2.0, 81));
  for (std::size_t i = 1; i + 1 < w.w.size(); ++i) CHECK(w.w[i + 1] - 2.0 * w.w[i] + w.w[i - 1] >= 0.0);
  CHECK(w.w[40] == 0.0);
}

TEST_CASE("generating function rejects J beyond the sampled window") {
  const ChebyshevSeries force(-1.0, 1.0, {0.0, -1.0});
  const auto ecp = integrate_to_ecp(force, 0.0, 1.0, linspace(-1.0, 1.0, 5));
  CHECK(expect_code([&] { generating_function_from_ecp(ecp, {0.0, 5.0}); }) ==
        static_cast<int>(ErrorCode::BoundaryDominated));

  EffectivePotentialCurve standard;
  standard.kind = CurveKind::Standard;
  CHECK(expect_code([&] { generating_function_from_ecp(standard, {0.0}); }) ==
        static_cast<int>(ErrorCode::InvalidArgument));
}

TEST_CASE("Legendre transform of a quadratic is a quadratic") {
  GeneratingFunction w;
  w.beta = 1.0;
  w.J = linspace(-3.0, 3.0, 121);
  for (double j : w.J) w.w.push_back(j * j / 2.0 / 2.25);
  const auto Q = linspace(-1.0, 1.0, 21);
  const auto V = legendre_transform(w, Q);
  CHECK(V.kind == CurveKind::Standard);
  for (std::size_t i = 0; i < Q.size(); ++i) CHECK(V.values[i] == doctest::Approx(2.25 * Q[i] * Q[i] / 2.0).epsilon(1e-9));
}

TEST_CASE("convex conjugate is an involution on convex functions") {
  const auto x = linspace(-3.0, 3.0, 241);
  std::vector<double> f;
  for (double v : x) f.push_back(std::log(std::cosh(v)) + 0.25 * v * v);
  const auto y = linspace(-1.5, 1.5, 121);
  const auto once = convex_conjugate(x, f, y);
  const auto x_inner = linspace(-1.0, 1.0, 21);
  const auto twice = convex_conjugate(y, once.values, x_inner);
  for (std::size_t i = 0; i < x_inner.size(); ++i) {
    const double v = x_inner[i];
    CHECK(twice.values[i] == doctest::Approx(std::log(std::cosh(v)) + 0.25 * v * v).epsilon(1e-7));
  }
  // argmax of the first transform is the inverse of f'
  for (std::size_t i = 0; i < y.size(); i += 20) {
    const double a = once.argmax[i];
    CHECK(std::tanh(a) + 0.5 * a == doctest::Approx(y[i]).epsilon(1e-6));
  }
}

TEST_CASE("convex conjugate errors") {
  const auto x = linspace(-1.0, 1.0, 21);
  std::vector<double> f;
  for (double v : x) f.push_back(v * v);
  CHECK(expect_code([&] { convex_conjugate(x, f, {5.0}); }) == static_cast<int>(ErrorCode::SupremumAtEdge));

  std::vector<double> bumpy;
  for (double v : x) bumpy.push_back(v * v * v * v - v * v);
  CHECK(expect_code([&] { convex_conjugate(x, bumpy, {0.0}); }) == static_cast<int>(ErrorCode::ConvexityViolation));

  std::vector<double> uneven = x;
  uneven[3] += 0.01;
  CHECK(expect_code([&] { convex_conjugate(uneven, f, {0.0}); }) == static_cast<int>(ErrorCode::NonuniformGrid));
}

TEST_CASE("effective frequency of quadratic curves") {
  EffectivePotentialCurve c;
  c.kind = CurveKind::Standard;
  c.grid = linspace(-1.5, 1.5, 61);
  for (double q : c.grid) c.values.push_back(0.5 * q * q);
  const auto sym = effective_frequency(c, 1.0, {.symmetric = true});
  CHECK(sym.omega == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sym.Q_min == 0.0);

  c.values.clear();
  for (double q : c.grid) c.values.push_back(0.5 * 9.0 * (q - 0.31) * (q - 0.31) + 0.2);
  const auto shifted = effective_frequency(c, 2.0);
  CHECK(shifted.Q_min == doctest::Approx(0.31).epsilon(1e-9));
  CHECK(shifted.omega == doctest::Approx(std::sqrt(4.5)).epsilon(1e-9));
  CHECK(shifted.window_spread < 1e-9);

  c.values.clear();
  for (double q : c.grid) c.values.push_back((q - 1.4) * (q - 1.4));
  CHECK(expect_code([&] { effective_frequency(c, 1.0); }) == static_cast<int>(ErrorCode::MinimumAtEdge));

  c.values.assign(c.grid.size(), 0.0);
  CHECK(expect_code([&] { effective_frequency(c, 1.0, {.symmetric = true}); }) ==
        static_cast<int>(ErrorCode::FlatCurvature));
}

TEST_CASE("pipeline on an exact harmonic force recovers omega = 1") {
  const auto t = synthetic_table(linear_force, linspace(-4.0, 4.0, 21), 1e-4, 1.0, 21);
  PipelineOptions opts;
  opts.degree = 5;
  opts.q_grid = linspace(-4.0, 4.0, 41);
  opts.Q_grid = linspace(-1.5, 1.5, 31);
  opts.bootstrap = 16;
  const auto r = run_pipeline(t, opts);
  CHECK(r.frequency.omega == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.frequency.Q_min == 0.0);
  CHECK(r.omega_stderr < 1e-3);
  CHECK(r.omega_replicates.size() == 16);
  for (std::size_t i = 0; i < opts.Q_grid.size(); ++i) {
    const double Q = opts.Q_grid[i];
    CHECK(r.standard.values[i] == doctest::Approx(0.5 * Q * Q).epsilon(1e-3));
    CHECK(r.standard.stderr_[i] < 1e-3);
  }
  for (std::size_t i = 0; i < opts.q_grid.size(); ++i) {
    const double q = opts.q_grid[i];
    CHECK(r.classical.values[i] == doctest::Approx(0.5 * q * q).epsilon(1e-3));
  }
}

TEST_CASE("high-temperature double well: classical curve is non-convex, standard curve is convex") {
  const auto t = synthetic_table(double_well_force, linspace(-7.0, 7.0, 29), 1e-3, 0.1, 33);
  PipelineOptions opts;
  opts.degree = 5;
  opts.q_grid = linspace(-3.0, 3.0, 61);
  opts.Q_grid = linspace(-3.0, 3.0, 61);
  opts.bootstrap = 0;
  const auto r = run_pipeline(t, opts);
  double min_classical = 0.0, min_standard = 0.0;
  for (std::size_t i = 1; i + 1 < opts.q_grid.size(); ++i) {
    min_classical = std::min(min_classical, r.classical.values[i + 1] - 2 * r.classical.values[i] + r.classical.values[i - 1]);
    min_standard = std::min(min_standard, r.standard.values[i + 1] - 2 * r.standard.values[i] + r.standard.values[i - 1]);
  }
  CHECK(min_classical < -1e-3);
  CHECK(min_standard >= -1e-9);
}

TEST_CASE("aligned deviation ignores additive constants") {
  CHECK(aligned_max_deviation({1.0, 2.0, 3.0}, {0.0, 1.0, 2.0}) == 0.0);
  CHECK(aligned_max_deviation({0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}) == doctest::Approx(0.5));
}
