#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdyn/pimd.hpp"
#include "qdyn/polynomial.hpp"

namespace qdyn::effpot {

enum class CurveKind { Classical, Standard };

std::string to_string(CurveKind kind);

/// Tabulated effective potential. Classical curves also carry the analytic
/// fitted force and its integral, so they can be evaluated off-grid.
struct EffectivePotentialCurve {
  CurveKind kind = CurveKind::Classical;
  double beta = 1.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> stderr_;  // empty when no error estimate is attached
  std::optional<ChebyshevSeries> force;
  std::optional<ChebyshevSeries> potential;
  std::string anchor;  // additive-constant convention

  double operator()(double q) const;  // analytic for classical curves, else linear interpolation
};

struct ForceFit {
  ChebyshevSeries force;
  Eigen::MatrixXd covariance;  // of force.coefficients()
  double chi2 = 0.0;
  int dof = 0;
  double condition = 0.0;  // of the weighted normal equations
  bool symmetric = false;

  double chi2_per_dof() const { return dof > 0 ? chi2 / dof : 0.0; }
  /// Series with coefficients replaced (same domain); used for resampling.
  ChebyshevSeries with_coefficients(const Eigen::VectorXd& c) const;
};

/// Weighted (1/stderr^2) least-squares Chebyshev fit over the table's span.
/// Symmetric systems use odd polynomials only. Throws IllConditioned if the
/// normal-equation condition number exceeds 1e12.
ForceFit fit_force_polynomial(const pimd::ForceTable& table, int degree, bool symmetric);

/// V^c(q) = -int_anchor^q F, tabulated on `grid`; V^c(anchor) = 0 exactly.
EffectivePotentialCurve integrate_to_ecp(const ChebyshevSeries& force, double anchor_q, double beta,
                                         const std::vector<double>& grid);

struct QuadratureOptions {
  /// Integration runs over the fitted window widened by this fraction on each side.
  double extension = 0.1;
  double relative_tolerance = 1e-11;
  /// Outside-window integrand mass above this fraction sets the extrapolation flag.
  double outside_mass_flag = 0.01;
};

struct GeneratingFunction {
  double beta = 1.0;
  std::vector<double> J;
  std::vector<double> w;
  double max_outside_mass = 0.0;
  bool extrapolation_flag = false;
};

/// w(J) = beta^-1 log int exp(beta (J q - V^c(q))) dq + C with w(0) = 0.
/// Throws BoundaryDominated when the integrand peaks within 5% of an edge.
GeneratingFunction generating_function_from_ecp(const EffectivePotentialCurve& ecp, const std::vector<double>& J,
                                                const QuadratureOptions& opts = {});

struct Conjugate {
  std::vector<double> y;
  std::vector<double> values;  // sup_x (x y - f(x))
  std::vector<double> argmax;
};

/// Convex conjugate of f tabulated on a uniform grid x, evaluated at y.
/// Grid supremum, then Brent refinement on a cubic spline of f.
/// Throws SupremumAtEdge if a maximizer is a grid end point and
/// ConvexityViolation if f has negative second differences.
Conjugate convex_conjugate(const std::vector<double>& x, const std::vector<double>& f, const std::vector<double>& y);

/// V(Q) = sup_J (J Q - w(J)).
EffectivePotentialCurve legendre_transform(const GeneratingFunction& w, const std::vector<double>& Q);

struct FrequencyOptions {
  int half_window = 5;
  double flat_tolerance = 1e-8;
  /// Fix Q_min at 0 and fit an even quadratic (symmetric potentials).
  bool symmetric = false;
};

struct FrequencyEstimate {
  double omega = 0.0;
  double Q_min = 0.0;
  double curvature = 0.0;
  /// Largest change of omega when the fit window is narrowed or widened by 2 points.
  double window_spread = 0.0;
};

/// omega_beta = sqrt(V''(Q_min) / m) from a local quadratic fit.
/// Throws MinimumAtEdge or FlatCurvature.
FrequencyEstimate effective_frequency(const EffectivePotentialCurve& standard, double mass,
                                      const FrequencyOptions& opts = {});

struct PipelineOptions {
  int degree = 15;
  bool symmetric = true;  // odd force fit and Q_min fixed at 0
  double mass = 1.0;
  std::vector<double> q_grid;  // output abscissae of the classical curve
  std::vector<double> Q_grid;  // output abscissae of the standard curve
  double J_max = 0.0;          // 0 selects a range from the fitted force
  int J_points = 241;
  int max_J_extensions = 4;
  QuadratureOptions quadrature;
  FrequencyOptions frequency;
  int bootstrap = 64;
  std::uint64_t seed = 2024;
};

struct PipelineResult {
  ForceFit fit;
  EffectivePotentialCurve classical;
  GeneratingFunction generating;
  EffectivePotentialCurve standard;
  FrequencyEstimate frequency;
  double omega_stderr = 0.0;  // bootstrap spread combined with the window spread
  std::vector<std::vector<double>> classical_replicates;
  std::vector<std::vector<double>> standard_replicates;
  std::vector<double> omega_replicates;
  std::vector<ChebyshevSeries> force_replicates;
};

/// Force table -> V^c -> w(J) -> V_beta(Q) -> omega_beta, with errors from a
/// parametric bootstrap of the fitted force coefficients.
PipelineResult run_pipeline(const pimd::ForceTable& table, const PipelineOptions& opts);

/// Largest |a_i - b_i - c| after choosing the constant c that best aligns the
/// curves in the max norm (midrange of the differences).
double aligned_max_deviation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace qdyn::effpot
