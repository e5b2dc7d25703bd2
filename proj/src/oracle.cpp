#include "qdyn/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qdyn/error.hpp"

namespace qdyn::oracle {
namespace {

constexpr double kBoundaryTol = 1e-6;
constexpr double kThermalCutoff = 1e-12;
constexpr double kTruncationTol = 1e-10;

struct Eigenpairs {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // interior nodes x k, column-major
};

// Eigenvectors of a symmetric pentadiagonal matrix (lower band storage,
// ldab = 3) for known eigenvalues.
void inverse_iteration(const std::vector<double>& lower_band, lapack_int n, const std::vector<double>& values, int k,
                       Eigen::MatrixXd& vectors) {
  const lapack_int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n);
  std::vector<lapack_int> pivots(n);
  for (int s = 0; s < k; ++s) {
    const double shift = values[s] * (1.0 + 1e-13) + 1e-13;
    std::fill(ab.begin(), ab.end(), 0.0);
    for (lapack_int j = 0; j < n; ++j) {
      for (lapack_int d = 0; d <= 2 && j + d < n; ++d) {
        const double v = lower_band[d + j * 3] - (d == 0 ? shift : 0.0);
        ab[(kl + ku + d) + j * ldab] = v;                // A(j + d, j)
        if (d > 0) ab[(kl + ku - d) + (j + d) * ldab] = v;  // A(j, j + d)
      }
    }
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, pivots.data());
    if (info < 0) throw Error(ErrorCode::NotConverged, "band factorization failed");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += 1e-3 * std::sin(0.37 * static_cast<double>(i) + s);
    for (int it = 0; it < 4; ++it) {
      info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab, pivots.data(), x.data(), n);
      if (info != 0) throw Error(ErrorCode::NotConverged, "band solve failed");
      for (int p = 0; p < s; ++p) x -= vectors.col(p).dot(x) * vectors.col(p);
      x.normalize();
    }
    vectors.col(s) = x;
  }
}

// Lowest k eigenpairs of T + diag(u) on the interior nodes.
Eigenpairs lowest_eigenpairs(const std::vector<double>& u, double kinetic, double h, Stencil stencil, int k) {
  const lapack_int n = static_cast<lapack_int>(u.size());
  if (k > n) throw Error(ErrorCode::NotConverged, "more states requested than interior grid nodes");
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  Eigenpairs out;
  out.values.resize(n);
  out.vectors.resize(n, k);
  lapack_int found = 0;
  lapack_int info = 0;
  if (stencil == Stencil::ThreePoint) {
    std::vector<double> d(n), e(n, -kinetic / (h * h));
    for (lapack_int i = 0; i < n; ++i) d[i] = 2.0 * kinetic / (h * h) + u[i];
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, k, abstol, &found,
                          out.values.data(), out.vectors.data(), n, support.data());
  } else {
    // -psi'' ~ (psi_{i-2} - 16 psi_{i-1} + 30 psi_i - 16 psi_{i+1} + psi_{i+2}) / 12 h^2
    const lapack_int kd = 2;
    const lapack_int ldab = kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    const double c = kinetic / (12.0 * h * h);
    for (lapack_int j = 0; j < n; ++j) {
      ab[0 + j * ldab] = 30.0 * c + u[j];
      if (j + 1 < n) ab[1 + j * ldab] = -16.0 * c;
      if (j + 2 < n) ab[2 + j * ldab] = c;
    }
    // Eigenvalues by band bisection, eigenvectors by inverse iteration on the
    // shifted band matrix; forming the full band-reduction transform is O(n^2).
    const std::vector<double> band = ab;
    std::vector<lapack_int> ifail(n);
    double unused = 0.0;
    info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, kd, ab.data(), ldab, &unused, 1, 0.0, 0.0, 1, k,
                          abstol, &found, out.values.data(), &unused, 1, ifail.data());
    if (info == 0 && found == k) inverse_iteration(band, n, out.values, k, out.vectors);
  }
  if (info != 0 || found != k)
    throw Error(ErrorCode::NotConverged, "LAPACK eigensolver failed (info=" + std::to_string(info) + ")");
  out.values.resize(k);
  return out;
}

std::vector<double> interior_potential(const model::PotentialSpec& pot, const GridSpec& grid, double tilt) {
  std::vector<double> u(grid.n_points - 2);
  for (int i = 1; i + 1 < grid.n_points; ++i) {
    const double q = grid.point(i);
    u[i - 1] = model::eval_potential(pot, q) - tilt * q;
  }
  return u;
}

void check_boundary(const Eigen::MatrixXd& vectors, double h, int n_check) {
  const Eigen::Index last = vectors.rows() - 1;
  for (int s = 0; s < n_check; ++s) {
    const double edge = std::max(std::abs(vectors(0, s)), std::abs(vectors(last, s))) / std::sqrt(h);
    if (edge > kBoundaryTol)
      throw Error(ErrorCode::BoundaryLeak,
                  "state " + std::to_string(s) + " has amplitude " + std::to_string(edge) +
                      " at the grid boundary; widen the grid");
  }
}

void check_resolution(const std::vector<double>& energies, const std::vector<double>& u, double kinetic, double h) {
  const double u_min = *std::min_element(u.begin(), u.end());
  const double k_max = std::sqrt(std::max(0.0, energies.back() - u_min) / kinetic);
  // Fewer than ~12 nodes per local wavelength means the stencil is unreliable.
  if (k_max * h > 0.5)
    throw Error(ErrorCode::NotConverged, "highest requested state is under-resolved (k h = " +
                                             std::to_string(k_max * h) + "); refine the grid");
}

double thermal_tail(const std::vector<double>& e, double beta) { return std::exp(-beta * (e.back() - e.front())); }

void check_truncation(const EigenSystem& eig, double beta) {
  if (eig.energies.empty()) throw Error(ErrorCode::TruncationError, "empty eigensystem");
  const double tail = thermal_tail(eig.energies, beta);
  if (tail > kTruncationTol)
    throw Error(ErrorCode::TruncationError, "Boltzmann weight of highest state " + std::to_string(tail) +
                                                " exceeds tolerance; request more states");
}

struct Boltzmann {
  std::vector<double> weights;  // exp(-beta (E_n - E_0)) / Z'
};

Boltzmann boltzmann(const EigenSystem& eig, double beta) {
  Boltzmann b;
  b.weights.resize(eig.energies.size());
  double z = 0.0;
  for (std::size_t n = 0; n < eig.energies.size(); ++n) {
    b.weights[n] = std::exp(-beta * (eig.energies[n] - eig.energies[0]));
    z += b.weights[n];
  }
  for (double& w : b.weights) w /= z;
  return b;
}

template <class PairWeight>
CorrelationSeries eigen_sum(const EigenSystem& eig, double beta, const std::vector<double>& times, SeriesKind kind,
                            PairWeight&& pair_weight) {
  check_truncation(eig, beta);
  const auto b = boltzmann(eig, beta);
  CorrelationSeries out;
  out.kind = kind;
  out.beta = beta;
  out.times = times;
  out.values.assign(times.size(), cplx(0.0, 0.0));
  const int ns = eig.n_states();
  for (int n = 0; n < ns; ++n) {
    if (b.weights[n] < kThermalCutoff * 1e-4) continue;
    for (int m = 0; m < ns; ++m) {
      const double q = eig.q_elements(m, n);
      const double amp = b.weights[n] * q * q * pair_weight(m, n);
      if (amp == 0.0) continue;
      const double freq = (eig.energies[m] - eig.energies[n]) / eig.hbar;
      for (std::size_t i = 0; i < times.size(); ++i)
        out.values[i] += amp * cplx(std::cos(freq * times[i]), -std::sin(freq * times[i]));
    }
  }
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (!(q_min < q_max)) throw Error(ErrorCode::InvalidArgument, "grid requires q_min < q_max");
  if (n_points < 16) throw Error(ErrorCode::InvalidArgument, "grid requires at least 16 points");
}

EigenSystem solve_eigensystem(const model::PotentialSpec& pot, const model::SystemParams& sys, const GridSpec& grid,
                              int n_states, Stencil stencil) {
  pot.validate();
  sys.validate();
  grid.validate();
  if (n_states < 1) throw Error(ErrorCode::InvalidArgument, "n_states must be positive");
  const double h = grid.spacing();
  const double kinetic = sys.hbar * sys.hbar / (2.0 * pot.mass);
  const auto u = interior_potential(pot, grid, 0.0);
  auto pairs = lowest_eigenpairs(u, kinetic, h, stencil, n_states);
  check_resolution(pairs.values, u, kinetic, h);
  check_boundary(pairs.vectors, h, n_states);

  EigenSystem eig;
  eig.grid = grid;
  eig.mass = pot.mass;
  eig.hbar = sys.hbar;
  eig.energies = pairs.values;
  eig.wavefunctions = Eigen::MatrixXd::Zero(grid.n_points, n_states);
  const double norm = 1.0 / std::sqrt(h);
  for (int s = 0; s < n_states; ++s) {
    Eigen::VectorXd psi = pairs.vectors.col(s) * norm;
    const double peak = psi.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (std::abs(psi[i]) > 1e-3 * peak) {
        if (psi[i] < 0.0) psi = -psi;
        break;
      }
    }
    eig.wavefunctions.col(s).segment(1, psi.size()) = psi;
  }
  Eigen::VectorXd qgrid(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) qgrid[i] = grid.point(i);
  const Eigen::MatrixXd weighted = eig.wavefunctions.array().colwise() * (qgrid.array() * h);
  eig.q_elements = eig.wavefunctions.transpose() * weighted;
  for (int m = 0; m < n_states; ++m)
    for (int n = m + 1; n < n_states; ++n) eig.q_elements(n, m) = eig.q_elements(m, n);
  return eig;
}

EigenSystem solve_thermal_eigensystem(const model::PotentialSpec& pot, const model::SystemParams& sys,
                                      const GridSpec& grid, Stencil stencil) {
  int n = 16;
  for (;;) {
    auto eig = solve_eigensystem(pot, sys, grid, n, stencil);
    if (thermal_tail(eig.energies, sys.beta) < kThermalCutoff) return eig;
    n *= 2;
  }
}

double kubo_weight(double beta, double x) noexcept {
  const double y = beta * x;
  if (y == 0.0) return 1.0;
  if (std::abs(y) < 1e-6) return 1.0 - y / 2.0 + y * y / 6.0;
  return -std::expm1(-y) / y;
}

CorrelationSeries exact_correlation(const EigenSystem& eig, double beta, const std::vector<double>& times) {
  auto out = eigen_sum(eig, beta, times, SeriesKind::Exact, [](int, int) { return 1.0; });
  return out;
}

CorrelationSeries exact_canonical_correlation(const EigenSystem& eig, double beta, const std::vector<double>& times) {
  return eigen_sum(eig, beta, times, SeriesKind::Canonical, [&](int m, int n) {
    return m == n ? 1.0 : kubo_weight(beta, eig.energies[m] - eig.energies[n]);
  });
}

CorrelationSeries zero_temperature_correlation(const EigenSystem& eig, const std::vector<double>& times) {
  if (eig.n_states() < 2) throw Error(ErrorCode::TruncationError, "need at least two states");
  CorrelationSeries out;
  out.kind = SeriesKind::ZeroTemperature;
  out.beta = std::numeric_limits<double>::infinity();
  out.times = times;
  out.values.assign(times.size(), cplx(0.0, 0.0));
  for (int m = 0; m < eig.n_states(); ++m) {
    const double q = eig.q_elements(m, 0);
    const double freq = (eig.energies[m] - eig.energies[0]) / eig.hbar;
    for (std::size_t i = 0; i < times.size(); ++i)
      out.values[i] += q * q * cplx(std::cos(freq * times[i]), -std::sin(freq * times[i]));
  }
  return out;
}

namespace {

SpectralLines line_sum(const EigenSystem& eig, double beta, bool canonical) {
  check_truncation(eig, beta);
  const auto b = boltzmann(eig, beta);
  SpectralLines out;
  out.kind = canonical ? LineKind::Canonical : LineKind::Standard;
  out.beta = beta;
  constexpr double two_pi = 2.0 * 3.14159265358979323846;
  for (int n = 0; n < eig.n_states(); ++n) {
    for (int m = 0; m < eig.n_states(); ++m) {
      const double q = eig.q_elements(m, n);
      double w = two_pi * b.weights[n] * q * q;
      const double x = eig.energies[m] - eig.energies[n];
      if (canonical && m != n) w *= kubo_weight(beta, x);
      if (w < 1e-12) continue;
      out.lines.push_back({x / eig.hbar, w});
    }
  }
  return out;
}

}  // namespace

SpectralLines exact_spectrum(const EigenSystem& eig, double beta) { return line_sum(eig, beta, false); }

SpectralLines exact_canonical_spectrum(const EigenSystem& eig, double beta) { return line_sum(eig, beta, true); }

double tilted_generating_function(const model::PotentialSpec& pot, const model::SystemParams& sys,
                                  const GridSpec& grid, double J, Stencil stencil) {
  pot.validate();
  sys.validate();
  grid.validate();
  const double h = grid.spacing();
  const double kinetic = sys.hbar * sys.hbar / (2.0 * pot.mass);
  const auto u = interior_potential(pot, grid, J);
  const auto min_it = std::min_element(u.begin(), u.end());
  const auto min_index = static_cast<double>(min_it - u.begin());
  const double edge_band = 0.05 * static_cast<double>(u.size());
  if (min_index < edge_band || min_index > static_cast<double>(u.size()) - edge_band)
    throw Error(ErrorCode::BoundaryLeak, "tilt J = " + std::to_string(J) + " moves the potential minimum to the grid edge");
  int k = 16;
  for (;;) {
    k = std::min<int>(k, static_cast<int>(u.size()));
    auto pairs = lowest_eigenpairs(u, kinetic, h, stencil, k);
    const bool converged = thermal_tail(pairs.values, sys.beta) < kThermalCutoff;
    if (converged || k == static_cast<int>(u.size())) {
      check_resolution(pairs.values, u, kinetic, h);
      int populated = 0;
      while (populated < k && std::exp(-sys.beta * (pairs.values[populated] - pairs.values[0])) > kTruncationTol)
        ++populated;
      check_boundary(pairs.vectors, h, populated);
      const double e0 = pairs.values.front();
      double sum = 0.0;
      for (double e : pairs.values) sum += std::exp(-sys.beta * (e - e0));
      return -e0 + std::log(sum) / sys.beta;
    }
    k *= 2;
  }
}

}  // namespace qdyn::oracle
