#include "wavecq/special_kernels.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "wavecq/errors.hpp"

namespace wavecq {
namespace {

using lcplx = std::complex<long double>;

constexpr double kSeriesRadius = 2.0;
constexpr double kContinuedFractionRadius = 19.0;

// 1/w without the overflow-guarded library division (|w| stays moderate here).
inline cplx reciprocal(cplx w) {
  const double n = std::norm(w);
  return {w.real() / n, -w.imag() / n};
}

// Ascending series accumulated in type T. Near |z| = 8 on the real axis the
// two parts cancel by ~6 digits, so the wide-range variant uses long double.
template <class T>
cplx k0_scaled_series_impl(cplx zd) {
  using C = std::complex<T>;
  const C z(zd.real(), zd.imag());
  const C q = z * z / T(4);
  C term = T(1);
  C i0 = T(1);
  C tail = T(0);
  T harmonic = T(0);
  const T tol = std::numeric_limits<T>::epsilon() / T(16);
  for (int k = 1; k < 200; ++k) {
    term *= q / static_cast<T>(k * k);
    harmonic += T(1) / static_cast<T>(k);
    i0 += term;
    tail += harmonic * term;
    if (std::norm(term) * harmonic * harmonic < tol * tol * std::norm(i0)) break;
  }
  const T egamma = static_cast<T>(0.577215664901532860606512090082402431L);
  const C k0 = -(std::log(z / T(2)) + egamma) * i0 + tail;
  const C scaled = std::exp(z) * k0;
  return {static_cast<double>(scaled.real()), static_cast<double>(scaled.imag())};
}

// a_{k+1}/a_k for the large-argument expansion sum a_k z^{-k} of e^z K_0(z) sqrt(2z/pi).
inline double asymptotic_ratio(int k) {
  const double odd = 2.0 * k + 1.0;
  return -odd * odd / (8.0 * (k + 1.0));
}

cplx k0_scaled_asymptotic_plain(cplx z) {
  cplx sum = 1.0;
  cplx term = 1.0;
  const double limit = 2.0 * std::abs(z);
  const cplx inv_z = reciprocal(z);
  for (int k = 0; k < 200 && k < limit; ++k) {
    const cplx next = term * (asymptotic_ratio(k) * inv_z);
    if (std::norm(next) >= std::norm(term)) break;
    sum += next;
    term = next;
    if (std::norm(term) < 1e-34 * std::norm(sum)) break;
  }
  return std::sqrt(kPi / (2.0 * z)) * sum;
}

// e^w w^{-a} Gamma(a, w) by the Legendre continued fraction (modified Lentz).
cplx upper_gamma_cf(double a, cplx w) {
  constexpr double tiny = 1e-300;
  cplx b = w + 1.0 - a;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

// G_p(w) = e^w Gamma(p) Gamma(1-p, w) / (2 pi) for integer p >= 1.
cplx stokes_terminant(int p, cplx w) {
  cplx factor = 1.0;  // (p-1)! w^{1-p}
  for (int j = 1; j < p; ++j) factor *= static_cast<double>(j) / w;
  return factor * upper_gamma_cf(1.0 - p, w) / (2.0 * kPi);
}

// Optimal truncation after l ~ 2|z| terms plus the re-expanded remainder
//   R_l = (-1)^l 2 sum_{k<m} a_k z^{-k} G_{l-k}(2z).
cplx k0_scaled_improved_impl(cplx z) {
  const int l = static_cast<int>(2.0 * std::abs(z));
  constexpr int m = 8;
  std::array<cplx, m> head{};
  cplx sum = 0.0;
  cplx term = 1.0;
  for (int k = 0; k < l; ++k) {
    if (k < m) head[k] = term;
    sum += term;
    term *= asymptotic_ratio(k) / z;
  }
  cplx remainder = 0.0;
  const cplx w = 2.0 * z;
  for (int k = 0; k < m && k < l; ++k) remainder += head[k] * stokes_terminant(l - k, w);
  remainder *= (l % 2 == 0 ? 2.0 : -2.0);
  return std::sqrt(kPi / (2.0 * z)) * (sum + remainder);
}

// Steed's evaluation of Temme's continued fraction for K_0, which gives
// e^z K_0(z) = sqrt(pi/(2z)) / S directly.
cplx k0_scaled_cf_impl(cplx z) {
  cplx b = 2.0 * (1.0 + z);
  cplx d = reciprocal(b);
  cplx delh = d;
  cplx q1 = 0.0;
  cplx q2 = 1.0;
  const double a1 = 0.25;
  cplx q = a1;
  cplx c = a1;
  double a = -a1;
  cplx sum = 1.0 + q * delh;
  for (int i = 1; i < 1000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const cplx qnew = (q1 - b * q2) * (1.0 / a);
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = reciprocal(b + a * d);
    delh = (b * d - 1.0) * delh;
    const cplx dels = q * delh;
    sum += dels;
    if (std::norm(dels) < 1e-34 * std::norm(sum)) break;
  }
  return std::sqrt(kPi / (2.0 * z)) / sum;
}

}  // namespace

namespace detail {

cplx k0_scaled_series(cplx z) { return k0_scaled_series_impl<long double>(z); }
cplx k0_scaled_continued_fraction(cplx z) { return k0_scaled_cf_impl(z); }
cplx k0_scaled_asymptotic(cplx z) { return k0_scaled_asymptotic_plain(z); }
cplx k0_scaled_improved_asymptotic(cplx z) { return k0_scaled_improved_impl(z); }

}  // namespace detail

cplx bessel_k0_scaled(cplx z) {
  if (z == cplx(0.0, 0.0)) throw DomainError("bessel_k0_scaled: z = 0");
  if (z.real() < 0.0) throw DomainError("bessel_k0_scaled: Re z < 0");
  const double a = std::abs(z);
  if (a < kSeriesRadius) return k0_scaled_series_impl<double>(z);
  if (a < kContinuedFractionRadius) return k0_scaled_cf_impl(z);
  return k0_scaled_asymptotic_plain(z);
}

double bessel_j0(double x) {
  if (x < 0.0) throw DomainError("bessel_j0: negative argument");
  if (x <= 20.0) {
    // Alternating series; terms reach ~1e7 at x = 20, so accumulate in long double.
    const long double q = -static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
      term *= q / static_cast<long double>(k * k);
      sum += term;
      if (std::abs(term) < 1e-22L) break;
    }
    return static_cast<double>(sum);
  }
  // Hankel expansion J_0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)).
  double p = 0.0;
  double q = 0.0;
  double term = 1.0;
  const double inv8x = 1.0 / (8.0 * x);
  for (int k = 0; k < 60; ++k) {
    // term = a_k(0) / x^k with a_k from the product of odd squares.
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0 ? term : -term);
    } else {
      q += (((k - 1) / 2) % 2 == 0 ? -term : term);
    }
    const double odd = 2.0 * k + 1.0;
    const double next = term * odd * odd * inv8x / (k + 1.0);
    if (next > term || next < 1e-18) break;
    term = next;
  }
  const double phase = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(phase) - q * std::sin(phase));
}

cplx scaled_kernel(KernelFamily family, cplx s, double r) {
  if (!(r > 0.0)) throw DomainError("kernel: distance must be positive");
  switch (family) {
    case KernelFamily::D2: return bessel_k0_scaled(s * r) / (2.0 * kPi);
    case KernelFamily::D3: return cplx(1.0 / (4.0 * kPi * r), 0.0);
  }
  throw std::logic_error("unhandled kernel family");
}

cplx shifted_kernel(KernelFamily family, cplx s, double r, double t_shift) {
  if (!(s.real() > 0.0)) throw DomainError("kernel: Re s must be positive");
  if (t_shift < 0.0 || t_shift > r) {
    throw DomainError("shifted_kernel: shift " + std::to_string(t_shift) +
                      " outside [0, r] for r = " + std::to_string(r));
  }
  return std::exp(-s * (r - t_shift)) * scaled_kernel(family, s, r);
}

cplx laplace_kernel(KernelFamily family, cplx s, double r) {
  return shifted_kernel(family, s, r, 0.0);
}

double time_kernel_2d(double t, double r) {
  if (!(r > 0.0)) throw DomainError("time_kernel_2d: distance must be positive");
  if (t == r) throw DomainError("time_kernel_2d: singular at t = r");
  if (t < r) return 0.0;
  return 1.0 / (2.0 * kPi * std::sqrt((t - r) * (t + r)));
}

}  // namespace wavecq
