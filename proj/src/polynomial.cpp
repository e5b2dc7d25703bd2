#include "qdyn/polynomial.hpp"

#include <cmath>

#include "qdyn/error.hpp"

namespace qdyn {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> a(c_.size() + 1, 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
  return Polynomial(std::move(a));
}

int Polynomial::degree() const noexcept {
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k)
    if (c_[k] != 0.0) return k;
  return -1;
}

void chebyshev_basis(double u, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = u;
  for (std::size_t k = 2; k < out.size(); ++k) out[k] = 2.0 * u * out[k - 1] - out[k - 2];
}

ChebyshevSeries::ChebyshevSeries(double lo, double hi, std::vector<double> coefficients)
    : lo_(lo), hi_(hi), a_(std::move(coefficients)) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "Chebyshev domain must satisfy lo < hi");
}

double ChebyshevSeries::operator()(double x) const noexcept {
  if (a_.empty()) return 0.0;
  const double half = 0.5 * (hi_ - lo_);
  const double u = (x - 0.5 * (hi_ + lo_)) / half;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = a_.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * u * b1 - b2 + a_[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + a_[0];
}

ChebyshevSeries ChebyshevSeries::derivative() const {
  const std::size_t n = a_.size();
  if (n <= 1) return ChebyshevSeries(lo_, hi_, {0.0});
  // Standard recurrence d_{k-1} = d_{k+1} + 2 k a_k, then chain rule du/dx.
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) d[k - 1] = d[k + 1] + 2.0 * static_cast<double>(k) * a_[k];
  d[0] *= 0.5;
  d.resize(n - 1);
  const double scale = 2.0 / (hi_ - lo_);
  for (double& v : d) v *= scale;
  return ChebyshevSeries(lo_, hi_, std::move(d));
}

ChebyshevSeries ChebyshevSeries::antiderivative(double anchor) const {
  const std::size_t n = a_.size();
  std::vector<double> b(n + 1, 0.0);
  auto coef = [&](std::size_t k) { return k < n ? a_[k] : 0.0; };
  // Integral of T_k: T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1)); T_0 -> T_1, T_1 -> T_2/4.
  for (std::size_t k = 1; k <= n; ++k) {
    const double left = (k == 1) ? 2.0 * coef(0) - coef(2) : coef(k - 1) - coef(k + 1);
    b[k] = left / (2.0 * static_cast<double>(k));
  }
  const double half = 0.5 * (hi_ - lo_);
  for (double& v : b) v *= half;
  ChebyshevSeries out(lo_, hi_, b);
  out.a_[0] -= out(anchor);
  return out;
}

Polynomial ChebyshevSeries::to_monomial() const {
  // Accumulate T_k(u) as monomials in u, then substitute u = (x - c)/h.
  const std::size_t n = a_.size();
  std::vector<double> in_u(n, 0.0);
  std::vector<double> tkm1(n, 0.0), tk(n, 0.0);
  if (n == 0) return Polynomial({0.0});
  tkm1[0] = 1.0;
  in_u[0] += a_[0];
  if (n > 1) {
    tk[1] = 1.0;
    in_u[1] += a_[1];
  }
  for (std::size_t k = 2; k < n; ++k) {
    std::vector<double> next(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) next[j + 1] += 2.0 * tk[j];
    for (std::size_t j = 0; j < n; ++j) next[j] -= tkm1[j];
    for (std::size_t j = 0; j < n; ++j) in_u[j] += a_[k] * next[j];
    tkm1 = std::move(tk);
    tk = std::move(next);
  }
  const double c = 0.5 * (hi_ + lo_);
  const double h = 0.5 * (hi_ - lo_);
  // (x - c)^j / h^j expanded by binomial coefficients.
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (in_u[j] == 0.0) continue;
    double binom = 1.0;
    const double scale = in_u[j] / std::pow(h, static_cast<double>(j));
    for (std::size_t i = 0; i <= j; ++i) {
      out[i] += scale * binom * std::pow(-c, static_cast<double>(j - i));
      binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
    }
  }
  return Polynomial(std::move(out));
}

}  // namespace qdyn
