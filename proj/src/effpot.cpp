#include "qdyn/effpot.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "qdyn/error.hpp"
#include "qdyn/series.hpp"

namespace qdyn::effpot {

std::string to_string(CurveKind kind) { return kind == CurveKind::Classical ? "classical" : "standard"; }

double EffectivePotentialCurve::operator()(double q) const {
  if (potential) return (*potential)(q);
  if (grid.size() < 2 || q < grid.front() || q > grid.back())
    throw Error(ErrorCode::InvalidArgument, "curve evaluated outside its grid");
  const auto it = std::upper_bound(grid.begin(), grid.end(), q);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - grid.begin()), grid.size() - 1);
  const double t = (q - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return (1.0 - t) * values[i - 1] + t * values[i];
}

ChebyshevSeries ForceFit::with_coefficients(const Eigen::VectorXd& c) const {
  return ChebyshevSeries(force.lo(), force.hi(), std::vector<double>(c.data(), c.data() + c.size()));
}

ForceFit fit_force_polynomial(const pimd::ForceTable& table, int degree, bool symmetric) {
  table.validate();
  const int n = static_cast<int>(table.size());
  if (degree < 1 || degree >= n)
    throw Error(ErrorCode::InvalidArgument, "fit degree must satisfy 1 <= degree < number of grid points");
  double lo = table.q_c.front(), hi = table.q_c.back();
  if (symmetric) {
    hi = std::max(std::abs(lo), std::abs(hi));
    lo = -hi;
  }
  const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);

  std::vector<int> terms;
  for (int k = 0; k <= degree; ++k)
    if (!symmetric || k % 2 == 1) terms.push_back(k);
  const int nb = static_cast<int>(terms.size());
  if (nb >= n) throw Error(ErrorCode::InvalidArgument, "fit has no residual degrees of freedom");

  Eigen::MatrixXd A(n, nb);
  Eigen::VectorXd b(n);
  std::vector<double> T(degree + 1);
  for (int i = 0; i < n; ++i) {
    chebyshev_basis((table.q_c[i] - center) / half, T);
    const double inv = 1.0 / table.stderr_[i];
    for (int j = 0; j < nb; ++j) A(i, j) = T[terms[j]] * inv;
    b[i] = table.force[i] * inv;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  ForceFit fit;
  fit.symmetric = symmetric;
  fit.condition = s[nb - 1] > 0.0 ? std::pow(s[0] / s[nb - 1], 2) : std::numeric_limits<double>::infinity();
  if (!(fit.condition <= 1e12)) {
    std::ostringstream msg;
    msg << "normal equations have condition number " << fit.condition << " for degree " << degree << " on "
        << n << " points; lower the degree";
    throw Error(ErrorCode::IllConditioned, msg.str());
  }
  const Eigen::VectorXd reduced = svd.solve(b);
  const Eigen::MatrixXd V = svd.matrixV();
  const Eigen::MatrixXd reduced_cov = V * s.cwiseInverse().cwiseAbs2().asDiagonal() * V.transpose();
  fit.chi2 = (A * reduced - b).squaredNorm();
  fit.dof = n - nb;

  Eigen::VectorXd full = Eigen::VectorXd::Zero(degree + 1);
  fit.covariance = Eigen::MatrixXd::Zero(degree + 1, degree + 1);
  for (int j = 0; j < nb; ++j) {
    full[terms[j]] = reduced[j];
    for (int k = 0; k < nb; ++k) fit.covariance(terms[j], terms[k]) = reduced_cov(j, k);
  }
  fit.force = ChebyshevSeries(lo, hi, std::vector<double>(full.data(), full.data() + full.size()));
  return fit;
}

EffectivePotentialCurve integrate_to_ecp(const ChebyshevSeries& force, double anchor_q, double beta,
                                         const std::vector<double>& grid) {
  const auto integral = force.antiderivative(anchor_q);
  std::vector<double> neg = integral.coefficients();
  for (double& c : neg) c = -c;
  EffectivePotentialCurve curve;
  curve.kind = CurveKind::Classical;
  curve.beta = beta;
  curve.force = force;
  curve.potential = ChebyshevSeries(integral.lo(), integral.hi(), std::move(neg));
  curve.anchor = "V(" + std::to_string(anchor_q) + ") = 0";
  curve.grid = grid;
  curve.values.reserve(grid.size());
  for (double q : grid) curve.values.push_back((*curve.potential)(q));
  return curve;
}

namespace {

struct LogIntegral {
  double log_value;
  double outside_fraction;
};

// log int_a^b exp(beta (J q - V(q))) dq, with the sampled window [lo, hi] inside [a, b].
LogIntegral log_partition(const ChebyshevSeries& V, double beta, double J, double lo, double hi, double a, double b,
                          double tol) {
  constexpr int kScan = 1201;
  double gmax = -std::numeric_limits<double>::infinity(), qmax = a;
  for (int i = 0; i < kScan; ++i) {
    const double q = a + (b - a) * i / (kScan - 1);
    const double g = beta * (J * q - V(q));
    if (g > gmax) {
      gmax = g;
      qmax = q;
    }
  }
  if (!std::isfinite(gmax)) throw Error(ErrorCode::BoundaryDominated, "integrand is not finite");
  if (qmax - a < 0.05 * (b - a) || b - qmax < 0.05 * (b - a)) {
    std::ostringstream msg;
    msg << "integrand for J = " << J << " peaks at q = " << qmax << ", within 5% of the integration edge [" << a
        << ", " << b << "]; reduce the J range or widen the sampled window";
    throw Error(ErrorCode::BoundaryDominated, msg.str());
  }
  auto f = [&](double q) { return std::exp(beta * (J * q - V(q)) - gmax); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto piece = [&](double x0, double x1) { return x1 > x0 ? GK::integrate(f, x0, x1, 20, tol) : 0.0; };
  // split at the peak so the adaptive rule cannot step over a narrow maximum
  double inside = 0.0, outside = piece(a, lo) + piece(hi, b);
  if (qmax > lo && qmax < hi) {
    inside = piece(lo, qmax) + piece(qmax, hi);
  } else {
    inside = piece(lo, hi);
  }
  const double total = inside + outside;
  return {gmax + std::log(total), outside / total};
}

}  // namespace

GeneratingFunction generating_function_from_ecp(const EffectivePotentialCurve& ecp, const std::vector<double>& J,
                                                const QuadratureOptions& opts) {
  if (ecp.kind != CurveKind::Classical || !ecp.potential)
    throw Error(ErrorCode::InvalidArgument, "generating function needs a classical curve with its fitted potential");
  const auto& V = *ecp.potential;
  const double lo = V.lo(), hi = V.hi();
  const double a = lo - opts.extension * (hi - lo), b = hi + opts.extension * (hi - lo);
  const double beta = ecp.beta;
  GeneratingFunction gf;
  gf.beta = beta;
  gf.J = J;
  gf.w.reserve(J.size());
  const double origin = log_partition(V, beta, 0.0, lo, hi, a, b, opts.relative_tolerance).log_value;
  for (double j : J) {
    const auto r = log_partition(V, beta, j, lo, hi, a, b, opts.relative_tolerance);
    gf.w.push_back((r.log_value - origin) / beta);
    gf.max_outside_mass = std::max(gf.max_outside_mass, r.outside_fraction);
  }
  gf.extrapolation_flag = gf.max_outside_mass > opts.outside_mass_flag;
  return gf;
}

Conjugate convex_conjugate(const std::vector<double>& x, const std::vector<double>& f, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 4 || f.size() != n) throw Error(ErrorCode::InvalidArgument, "convex conjugate needs >= 4 tabulated points");
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(x[i] - (x.front() + h * i)) > 1e-9 * std::max(1.0, std::abs(x[i])))
      throw Error(ErrorCode::NonuniformGrid, "convex conjugate needs a uniform grid");
    scale = std::max(scale, std::abs(f[i]));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = f[i + 1] - 2.0 * f[i] + f[i - 1];
    if (d2 < -1e-9 * scale) {
      std::ostringstream msg;
      msg << "tabulated function is not convex near x = " << x[i] << " (second difference " << d2 << ")";
      throw Error(ErrorCode::ConvexityViolation, msg.str());
    }
  }
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(f.begin(), f.end(), x.front(), h);
  Conjugate out;
  out.y = y;
  for (double yy : y) {
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[i] * yy - f[i];
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best == 0 || best == n - 1) {
      std::ostringstream msg;
      msg << "supremum for y = " << yy << " lies at the grid edge x = " << x[best] << "; extend the grid";
      throw Error(ErrorCode::SupremumAtEdge, msg.str());
    }
    auto neg = [&](double xx) { return spline(xx) - xx * yy; };
    const auto r = boost::math::tools::brent_find_minima(neg, x[best - 1], x[best + 1], 52);
    if (-r.second >= best_val) {
      out.values.push_back(-r.second);
      out.argmax.push_back(r.first);
    } else {
      out.values.push_back(best_val);
      out.argmax.push_back(x[best]);
    }
  }
  return out;
}

EffectivePotentialCurve legendre_transform(const GeneratingFunction& w, const std::vector<double>& Q) {
  const auto conj = convex_conjugate(w.J, w.w, Q);
  EffectivePotentialCurve curve;
  curve.kind = CurveKind::Standard;
  curve.beta = w.beta;
  curve.grid = Q;
  curve.values = conj.values;
  curve.anchor = "V(Q_min) = 0";
  return curve;
}

namespace {

// Least-squares quadratic around `center`; returns (curvature, slope at center).
std::pair<double, double> local_quadratic(const std::vector<double>& x, const std::vector<double>& v, int lo, int hi,
                                          double center, bool even) {
  const int m = hi - lo + 1;
  const int cols = even ? 2 : 3;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double d = x[lo + i] - center;
    A(i, 0) = 1.0;
    if (even) {
      A(i, 1) = d * d;
    } else {
      A(i, 1) = d;
      A(i, 2) = d * d;
    }
    b[i] = v[lo + i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return even ? std::make_pair(2.0 * c[1], 0.0) : std::make_pair(2.0 * c[2], c[1]);
}

}  // namespace

FrequencyEstimate effective_frequency(const EffectivePotentialCurve& standard, double mass,
                                      const FrequencyOptions& opts) {
  const auto& Q = standard.grid;
  const auto& V = standard.values;
  const int n = static_cast<int>(Q.size());
  const int hw = opts.half_window;
  if (hw < 1 || n < 2 * hw + 1 || !(mass > 0.0))
    throw Error(ErrorCode::InvalidArgument, "effective frequency needs 2 * half_window + 1 grid points and m > 0");
  int i0;
  FrequencyEstimate est;
  if (opts.symmetric) {
    i0 = static_cast<int>(std::min_element(Q.begin(), Q.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
                          Q.begin());
    est.Q_min = 0.0;
  } else {
    i0 = static_cast<int>(std::min_element(V.begin(), V.end()) - V.begin());
    if (i0 > 0 && i0 < n - 1) {
      const double denom = V[i0 - 1] - 2.0 * V[i0] + V[i0 + 1];
      const double h = Q[i0 + 1] - Q[i0];
      est.Q_min = Q[i0] + (denom > 0.0 ? 0.5 * h * (V[i0 - 1] - V[i0 + 1]) / denom : 0.0);
    } else {
      est.Q_min = Q[i0];
    }
  }
  if (i0 < hw || i0 > n - 1 - hw) {
    std::ostringstream msg;
    msg << "minimum at Q = " << Q[i0] << " is within " << hw << " points of the grid edge";
    throw Error(ErrorCode::MinimumAtEdge, msg.str());
  }
  auto omega_for = [&](int w) {
    const double curv = local_quadratic(Q, V, i0 - w, i0 + w, est.Q_min, opts.symmetric).first;
    return std::make_pair(curv, curv > 0.0 ? std::sqrt(curv / mass) : 0.0);
  };
  const auto [curv, omega] = omega_for(hw);
  if (!(curv >= opts.flat_tolerance)) {
    std::ostringstream msg;
    msg << "curvature " << curv << " at Q_min = " << est.Q_min << " is below " << opts.flat_tolerance;
    throw Error(ErrorCode::FlatCurvature, msg.str());
  }
  est.curvature = curv;
  est.omega = omega;
  for (int w : {hw - 2, hw + 2}) {
    if (w < 1 || i0 - w < 0 || i0 + w > n - 1) continue;
    est.window_spread = std::max(est.window_spread, std::abs(omega_for(w).second - omega));
  }
  return est;
}

namespace {

struct Stage {
  EffectivePotentialCurve classical;
  GeneratingFunction generating;
  EffectivePotentialCurve standard;
};

Stage transform(const ChebyshevSeries& force, double beta, const std::vector<double>& J, const PipelineOptions& opts) {
  Stage s;
  s.classical = integrate_to_ecp(force, 0.0, beta, opts.q_grid);
  s.generating = generating_function_from_ecp(s.classical, J, opts.quadrature);
  s.standard = legendre_transform(s.generating, opts.Q_grid);
  return s;
}

// Variance of q under exp(-beta V^c) over the fitted window (Simpson).
double thermal_variance(const ChebyshevSeries& force, double beta) {
  const auto minus_v = force.antiderivative(0.0);
  const int n = 2001;
  const double lo = force.lo(), h = (force.hi() - lo) / (n - 1);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = minus_v(lo + i * h);
  const double top = *std::max_element(u.begin(), u.end());
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double q = lo + i * h, e = w * std::exp(beta * (u[i] - top));
    z += e;
    m1 += e * q;
    m2 += e * q * q;
  }
  return m2 / z - (m1 / z) * (m1 / z);
}

double sample_std(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

}  // namespace

PipelineResult run_pipeline(const pimd::ForceTable& table, const PipelineOptions& opts) {
  if (opts.q_grid.empty() || opts.Q_grid.size() < 3 || opts.J_points < 8)
    throw Error(ErrorCode::InvalidArgument, "pipeline needs q and Q output grids and >= 8 J points");
  PipelineResult res;
  res.fit = fit_force_polynomial(table, opts.degree, opts.symmetric);

  double J_max = opts.J_max;
  if (J_max <= 0.0) {
    const double Q_edge = std::max(std::abs(opts.Q_grid.front()), std::abs(opts.Q_grid.back()));
    for (int i = 0; i <= 100; ++i) J_max = std::max(J_max, std::abs(res.fit.force(1.2 * Q_edge * (2.0 * i / 100 - 1.0))));
    // hot systems: V_beta'' ~ kT / <dq^2> is far stiffer than the bare force suggests
    const double gaussian = 1.2 * Q_edge / (table.beta * thermal_variance(res.fit.force, table.beta));
    J_max = std::max({1.2 * J_max, gaussian, 0.5});
  }
  int points = opts.J_points;
  std::vector<double> J;
  Stage central;
  for (int attempt = 0;; ++attempt) {
    J = linspace(-J_max, J_max, static_cast<std::size_t>(points));
    try {
      central = transform(res.fit.force, table.beta, J, opts);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SupremumAtEdge || attempt >= opts.max_J_extensions) throw;
      J_max *= 1.5;
      points = static_cast<int>(std::lround(1.5 * (points - 1))) + 1;
    }
  }
  res.classical = central.classical;
  res.generating = central.generating;
  res.standard = central.standard;
  FrequencyOptions fopts = opts.frequency;
  fopts.symmetric = fopts.symmetric || opts.symmetric;
  res.frequency = effective_frequency(res.standard, opts.mass, fopts);

  if (opts.bootstrap > 1) {
    const Eigen::VectorXd c0 = Eigen::Map<const Eigen::VectorXd>(res.fit.force.coefficients().data(),
                                                                 static_cast<long>(res.fit.force.coefficients().size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(res.fit.covariance);
    const Eigen::MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int b = 0; b < opts.bootstrap; ++b) {
      Eigen::VectorXd z(c0.size());
      for (long k = 0; k < z.size(); ++k) z[k] = gauss(rng);
      const auto force = res.fit.with_coefficients(c0 + root * z);
      const auto s = transform(force, table.beta, J, opts);
      res.classical_replicates.push_back(s.classical.values);
      res.standard_replicates.push_back(s.standard.values);
      res.omega_replicates.push_back(effective_frequency(s.standard, opts.mass, fopts).omega);
      res.force_replicates.push_back(force);
    }
    auto column_std = [](const std::vector<std::vector<double>>& reps, std::size_t n) {
      std::vector<double> out(n), col(reps.size());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t b = 0; b < reps.size(); ++b) col[b] = reps[b][i];
        out[i] = sample_std(col);
      }
      return out;
    };
    res.classical.stderr_ = column_std(res.classical_replicates, res.classical.grid.size());
    res.standard.stderr_ = column_std(res.standard_replicates, res.standard.grid.size());
    res.omega_stderr = std::hypot(sample_std(res.omega_replicates), res.frequency.window_spread);
  } else {
    res.omega_stderr = res.frequency.window_spread;
  }
  return res;
}

double aligned_max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw Error(ErrorCode::InvalidArgument, "curves differ in length");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lo = std::min(lo, a[i] - b[i]);
    hi = std::max(hi, a[i] - b[i]);
  }
  return 0.5 * (hi - lo);
}

}  // namespace qdyn::effpot
