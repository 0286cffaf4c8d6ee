#include "wavecq/power_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavecq {

PowerSeries::PowerSeries(std::vector<double> coeffs, std::size_t order) : c_(std::move(coeffs)) {
  c_.resize(order, 0.0);
}

PowerSeries PowerSeries::constant(double value, std::size_t order) {
  PowerSeries p(order);
  if (order > 0) p.c_[0] = value;
  return p;
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& o) {
  const std::size_t n = std::min(c_.size(), o.c_.size());
  for (std::size_t k = 0; k < n; ++k) c_[k] += o.c_[k];
  return *this;
}

PowerSeries& PowerSeries::operator*=(double a) {
  for (auto& v : c_) v *= a;
  return *this;
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t n = a.order();
  PowerSeries out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.c_[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.order(), n - i);
    for (std::size_t j = 0; j < jmax; ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return out;
}

PowerSeries operator/(const PowerSeries& a, const PowerSeries& b) {
  if (b.order() == 0 || b.c_[0] == 0.0) {
    throw std::domain_error("power series division by a series with zero constant term");
  }
  const std::size_t n = a.order();
  PowerSeries out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = a.c_[k];
    const std::size_t jmax = std::min(k, b.order() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc -= b.c_[j] * out.c_[k - j];
    out.c_[k] = acc / b.c_[0];
  }
  return out;
}

PowerSeries PowerSeries::shifted(std::size_t m) const {
  PowerSeries out(order());
  for (std::size_t k = m; k < order(); ++k) out.c_[k] = c_[k - m];
  return out;
}

PowerSeries PowerSeries::compose_polynomial(std::span<const double> poly) const {
  PowerSeries acc(order());
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    acc = acc * *this;
    if (acc.order() > 0) acc.c_[0] += *it;
  }
  return acc;
}

PowerSeries exp(const PowerSeries& a) {
  const std::size_t n = a.order();
  PowerSeries b(n);
  if (n == 0) return b;
  b[0] = std::exp(a[0]);
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * b[k - j];
    b[k] = acc / static_cast<double>(k);
  }
  return b;
}

}  // namespace wavecq
