#include "qdyn/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "qdyn/error.hpp"

namespace qdyn::model {

void PotentialSpec::validate() const {
  const int deg = degree();
  if (deg < 2 || deg % 2 != 0 || coefficients[deg] <= 0.0)
    throw Error(ErrorCode::InvalidArgument,
                "potential must be confining: leading coefficient needs even degree and positive sign");
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass must be positive");
  if (symmetric) {
    for (std::size_t k = 1; k < coefficients.size(); k += 2)
      if (coefficients[k] != 0.0)
        throw Error(ErrorCode::InvalidArgument,
                    "symmetric potential has nonzero odd coefficient c_" + std::to_string(k));
  }
}

int PotentialSpec::degree() const { return Polynomial(coefficients).degree(); }

void SystemParams::validate() const {
  if (!(beta > 0.0) || !(hbar > 0.0) || !(boltzmann > 0.0))
    throw Error(ErrorCode::InvalidArgument, "beta, hbar and boltzmann must be positive");
}

SystemParams natural_units(double beta) { return SystemParams{beta, 1.0, 1.0}; }

PotentialSpec double_well() { return PotentialSpec{{0.0, 0.0, -0.5, 0.0, 0.1}, 1.0, true}; }

PotentialSpec harmonic(double mass, double omega) {
  return PotentialSpec{{0.0, 0.0, 0.5 * mass * omega * omega}, mass, true};
}

double eval_potential(const PotentialSpec& pot, double q) noexcept {
  double acc = 0.0;
  for (auto it = pot.coefficients.rbegin(); it != pot.coefficients.rend(); ++it) acc = acc * q + *it;
  return acc;
}

double eval_force(const PotentialSpec& pot, double q) noexcept {
  double acc = 0.0;
  const auto& c = pot.coefficients;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * q + static_cast<double>(k) * c[k];
  return -acc;
}

double eval_curvature(const PotentialSpec& pot, double q) noexcept {
  double acc = 0.0;
  const auto& c = pot.coefficients;
  for (std::size_t k = c.size(); k-- > 2;) acc = acc * q + static_cast<double>(k * (k - 1)) * c[k];
  return acc;
}

std::vector<double> classical_minima(const PotentialSpec& pot) {
  const int deg = pot.degree();
  if (deg > 8) throw Error(ErrorCode::DegreeTooHigh, "classical_minima supports degree <= 8");
  const Polynomial dv = pot.polynomial().derivative();
  const int n = dv.degree();
  std::vector<double> roots;
  if (n < 1) return roots;
  const auto& d = dv.coefficients();
  // Companion matrix of the monic derivative.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -d[i] / d[n];
  const Eigen::VectorXcd eig = companion.eigenvalues();
  const Polynomial d2v = dv.derivative();
  for (const auto& z : eig) {
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 20; ++it) {  // Newton polish
      const double slope = d2v(x);
      if (slope == 0.0) break;
      const double step = dv(x) / slope;
      x -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    if (d2v(x) > 0.0) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9 * (1.0 + std::abs(a)); }),
              roots.end());
  return roots;
}

}  // namespace qdyn::model
