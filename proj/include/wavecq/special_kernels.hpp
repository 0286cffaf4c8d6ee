#pragma once

// Fundamental solutions of the wave equation in the Laplace and time domains.
//
//   2D: K(s,r) = K_0(sr)/(2 pi),     k(t,r) = H(t-r) / (2 pi sqrt(t^2 - r^2))
//   3D: K(s,r) = e^{-sr}/(4 pi r),   k(t,r) = delta(t-r)/(4 pi r)   (never sampled)
//
// Every kernel is assembled from the scaled value e^{sr} K(s,r), which stays
// bounded for Re s > 0. Shifts e^{s t_m} with t_m <= r are then applied as
// e^{-s(r - t_m)}, so nothing overflows for large |s|.

#include "wavecq/common.hpp"

namespace wavecq {

enum class KernelFamily { D2, D3 };

/// e^z K_0(z) for Re z >= 0, z != 0. Power series for |z| < 2, Temme's
/// continued fraction for 2 <= |z| < 19, asymptotic expansion beyond.
/// Throws DomainError at z = 0 or Re z < 0.
[[nodiscard]] cplx bessel_k0_scaled(cplx z);

namespace detail {

/// The individual evaluation branches, exposed for cross-validation.
/// Ascending series in extended precision (cancellation limits it to |z| <~ 8).
[[nodiscard]] cplx k0_scaled_series(cplx z);
[[nodiscard]] cplx k0_scaled_continued_fraction(cplx z);
/// Large-argument expansion truncated at its smallest term.
[[nodiscard]] cplx k0_scaled_asymptotic(cplx z);
/// The same truncation plus the exponentially improved (Stokes) remainder.
[[nodiscard]] cplx k0_scaled_improved_asymptotic(cplx z);

}  // namespace detail

/// J_0(x) for x >= 0 (absolute error ~1e-13). Throws DomainError for x < 0.
[[nodiscard]] double bessel_j0(double x);

/// e^{sr} K(s,r). Requires Re s >= 0, r > 0.
[[nodiscard]] cplx scaled_kernel(KernelFamily family, cplx s, double r);

/// K(s,r) for Re s > 0, r > 0. Identical to shifted_kernel(family, s, r, 0).
[[nodiscard]] cplx laplace_kernel(KernelFamily family, cplx s, double r);

/// e^{s t_shift} K(s,r) evaluated as e^{-s(r - t_shift)} [e^{sr} K(s,r)].
/// Requires 0 <= t_shift <= r.
[[nodiscard]] cplx shifted_kernel(KernelFamily family, cplx s, double r, double t_shift);

/// H(t-r)/(2 pi sqrt(t^2-r^2)); zero for t < r, DomainError at t = r.
[[nodiscard]] double time_kernel_2d(double t, double r);

}  // namespace wavecq
