#pragma once

#include <span>
#include <vector>

namespace qdyn {

/// Dense monomial polynomial p(x) = sum_k c[k] x^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  double operator()(double x) const noexcept;  // Horner
  Polynomial derivative() const;
  /// Antiderivative with zero constant term.
  Polynomial antiderivative() const;

  /// Degree of the highest nonzero coefficient; -1 for the zero polynomial.
  int degree() const noexcept;
  const std::vector<double>& coefficients() const noexcept { return c_; }

 private:
  std::vector<double> c_;
};

/// Chebyshev series sum_k a[k] T_k(u) with u = (x - center) / half_width.
///
/// Used for least-squares fits over a sampled interval; evaluation outside
/// the interval is the analytic continuation of the same polynomial.
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(double lo, double hi, std::vector<double> coefficients);

  double operator()(double x) const noexcept;  // Clenshaw
  ChebyshevSeries derivative() const;
  /// Antiderivative F with F(anchor) = 0.
  ChebyshevSeries antiderivative(double anchor) const;
  /// Equivalent monomial coefficients in the unscaled variable x.
  Polynomial to_monomial() const;

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<double>& coefficients() const noexcept { return a_; }

 private:
  double lo_ = -1.0;
  double hi_ = 1.0;
  std::vector<double> a_;
};

/// T_0..T_n evaluated at u into `out` (size n + 1).
void chebyshev_basis(double u, std::span<double> out) noexcept;

}  // namespace qdyn
