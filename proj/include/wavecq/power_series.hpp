#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavecq {

/// Truncated Taylor series sum_{k<n} c_k zeta^k with real coefficients.
///
/// All operations keep the truncation order of the left operand. This is the
/// FFT-free route to convolution weights, so it must not depend on any
/// contour or transform machinery.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::size_t order) : c_(order, 0.0) {}
  PowerSeries(std::vector<double> coeffs, std::size_t order);

  static PowerSeries constant(double value, std::size_t order);

  [[nodiscard]] std::size_t order() const noexcept { return c_.size(); }
  [[nodiscard]] double operator[](std::size_t k) const { return c_[k]; }
  double& operator[](std::size_t k) { return c_[k]; }
  [[nodiscard]] std::span<const double> coefficients() const noexcept { return c_; }

  PowerSeries& operator+=(const PowerSeries& o);
  PowerSeries& operator*=(double a);

  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator*(PowerSeries a, double s) { return a *= s; }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);

  /// Quotient a/b; throws std::domain_error if b has a vanishing constant term.
  friend PowerSeries operator/(const PowerSeries& a, const PowerSeries& b);

  /// Multiply by zeta^m (coefficients move up, tail is dropped).
  [[nodiscard]] PowerSeries shifted(std::size_t m) const;

  /// p(this) for a polynomial p with ascending coefficients (Horner).
  [[nodiscard]] PowerSeries compose_polynomial(std::span<const double> poly) const;

 private:
  std::vector<double> c_;
};

/// exp(a) via b_n = (1/n) sum_{k=1}^n k a_k b_{n-k}.
PowerSeries exp(const PowerSeries& a);

}  // namespace wavecq
