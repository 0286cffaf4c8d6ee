#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "oracles/bessel_oracle.hpp"
#include "oracles/inverse_laplace.hpp"
#include "wavecq/errors.hpp"
#include "wavecq/special_kernels.hpp"

using namespace wavecq;

namespace {

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(BesselK0Scaled, ValueAtOne) {
  // e K_0(1) from the 50-digit series: 1.14446307980689501...
  EXPECT_NEAR(bessel_k0_scaled(1.0).real(), 1.1444630798068950, 1e-14);
  EXPECT_NEAR(bessel_k0_scaled(1.0).imag(), 0.0, 1e-15);
  EXPECT_LT(rel_err(bessel_k0_scaled(1.0), oracle::series_oracle(1.0)), 1e-14);
}

TEST(BesselK0Scaled, MatchesOraclesAcrossRegimes) {
  for (double r : {1e-3, 0.1, 0.9, 1.99, 2.0, 2.01, 5.0, 7.99, 8.01, 9.5, 12.0, 15.0, 18.9, 19.1, 25.0, 60.0, 400.0}) {
    for (double ang : {0.0, 0.3, 0.9, 1.3, kPi / 2, -kPi / 2, -0.7}) {
      const cplx z = std::polar(r, ang);
      const cplx ref = oracle::k0_scaled_reference(z);
      EXPECT_LT(rel_err(bessel_k0_scaled(z), ref), 1e-12) << "z = " << z;
    }
  }
}

TEST(BesselK0Scaled, BranchesAgreeOnOverlap) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> radius(8.0, 12.0);
  std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
  for (int k = 0; k < 200; ++k) {
    const cplx z = std::polar(radius(gen), angle(gen));
    const cplx cf = detail::k0_scaled_continued_fraction(z);
    EXPECT_LT(rel_err(cf, detail::k0_scaled_improved_asymptotic(z)), 1e-9) << "z = " << z;
    EXPECT_LT(rel_err(cf, oracle::k0_scaled_reference(z)), 1e-13) << "z = " << z;
    // the test-side oracles agree on the same band
    EXPECT_LT(rel_err(oracle::series_oracle(z), oracle::asymptotic_oracle(z, true)), 1e-9) << "z = " << z;
  }
  // extended-precision series against the continued fraction where both hold
  for (double r : {2.0, 4.0, 7.5}) {
    for (double ang : {-1.5, 0.0, 1.0}) {
      const cplx z = std::polar(r, ang);
      EXPECT_LT(rel_err(detail::k0_scaled_series(z), detail::k0_scaled_continued_fraction(z)), 1e-12);
    }
  }
  for (double r : {19.0, 30.0, 100.0}) {
    for (double ang : {-1.5, 0.0, 1.0}) {
      const cplx z = std::polar(r, ang);
      EXPECT_LT(rel_err(detail::k0_scaled_continued_fraction(z), detail::k0_scaled_asymptotic(z)), 1e-13);
    }
  }
}

TEST(BesselK0Scaled, LargeArgumentThreeTermAsymptotics) {
  // sqrt(pi/2z)(1 - 1/(8z) + 9/(128 z^2)) has a first neglected term of
  // 225/(3072 z^3), i.e. ~6e-7 relative at |z| = 50.
  for (double ang : {-kPi / 2, -0.5, 0.0, 0.5, kPi / 2}) {
    const cplx z = std::polar(50.0, ang);
    const cplx three = std::sqrt(kPi / (2.0 * z)) * (1.0 - 1.0 / (8.0 * z) + 9.0 / (128.0 * z * z));
    EXPECT_LT(rel_err(bessel_k0_scaled(z), three), 1e-6);
    // Each further term tightens the agreement by roughly the next term's size.
    const cplx lead = std::sqrt(kPi / (2.0 * z));
    const cplx a3 = -225.0 / 3072.0, a4 = a3 * (-49.0 / 32.0);
    const cplx four = three + lead * a3 / (z * z * z);
    EXPECT_LT(rel_err(bessel_k0_scaled(z), four), 3e-8);
    const cplx five = four + lead * a4 / (z * z * z * z);
    EXPECT_LT(rel_err(bessel_k0_scaled(z), five), 1e-9);
  }
}

TEST(BesselK0Scaled, SmallArgumentLogarithm) {
  for (double x : {1e-3, 1e-5, 1e-8}) {
    const double leading = -std::log(x / 2.0) - kEulerGamma;
    // next correction is O(x) from e^x and O(x^2 ln x) from the series
    EXPECT_NEAR(bessel_k0_scaled(x).real(), leading, 2.0 * x * leading);
  }
}

TEST(BesselK0Scaled, DomainErrors) {
  EXPECT_THROW((void)bessel_k0_scaled(0.0), DomainError);
  EXPECT_THROW((void)bessel_k0_scaled(cplx(-0.1, 1.0)), DomainError);
  EXPECT_NO_THROW((void)bessel_k0_scaled(cplx(0.0, 3.0)));
}

TEST(BesselK0Scaled, ConjugateSymmetry) {
  for (double r : {0.5, 6.0, 10.0, 30.0}) {
    const cplx z = std::polar(r, 0.8);
    const cplx a = bessel_k0_scaled(z);
    const cplx b = bessel_k0_scaled(std::conj(z));
    EXPECT_EQ(a, std::conj(b));
  }
}

TEST(BesselJ0, KnownValues) {
  EXPECT_DOUBLE_EQ(bessel_j0(0.0), 1.0);
  EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-9);
  EXPECT_THROW((void)bessel_j0(-1.0), DomainError);
}

TEST(BesselJ0, FirstZeroFromBisectionOnOracle) {
  double lo = 2.0, hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (oracle::j0_series_oracle(mid) > 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 2.4048255577, 1e-9);
  EXPECT_NEAR(bessel_j0(lo), 0.0, 1e-12);
}

TEST(BesselJ0, AgreesWithSeriesOracle) {
  for (double x = 0.0; x <= 50.0; x += 0.173) {
    EXPECT_NEAR(bessel_j0(x), oracle::j0_series_oracle(x), 1e-12) << "x = " << x;
  }
}

TEST(BesselJ0, AsymptoticEnvelope) {
  for (double x = 30.0; x < 3000.0; x *= 1.37) {
    EXPECT_LE(std::abs(bessel_j0(x)), std::sqrt(2.0 / (kPi * x)) * 1.1);
  }
}

TEST(LaplaceKernel, ThreeDimensionalScaledValueIsStatic) {
  for (cplx s : {cplx(1.0, 0.0), cplx(0.3, 50.0), cplx(20.0, -7.0)}) {
    for (double r : {0.1, 1.0, 3.7}) {
      const cplx scaled = std::exp(s * r) * laplace_kernel(KernelFamily::D3, s, r);
      EXPECT_NEAR(std::abs(scaled - 1.0 / (4.0 * kPi * r)), 0.0, 1e-12 / r);
      EXPECT_EQ(scaled_kernel(KernelFamily::D3, s, r), cplx(1.0 / (4.0 * kPi * r), 0.0));
    }
  }
}

TEST(LaplaceKernel, TwoDimensionalAtUnitArguments) {
  // K_0(1)/(2 pi) = 0.06700812050849713...
  EXPECT_NEAR(laplace_kernel(KernelFamily::D2, 1.0, 1.0).real(), 0.06700812050849714, 1e-15);
}

TEST(LaplaceKernel, ScaledValueBoundedAlongVerticalLines) {
  for (auto family : {KernelFamily::D2, KernelFamily::D3}) {
    for (double sigma : {0.5, 1.0, 5.0}) {
      for (double r : {0.2, 1.0, 2.5}) {
        double prev = std::abs(scaled_kernel(family, cplx(sigma, 10.0), r));
        for (double y = 12.0; y < 5000.0; y *= 1.2) {
          const double cur = std::abs(scaled_kernel(family, cplx(sigma, y), r));
          EXPECT_LE(cur, prev * (1.0 + 1e-14)) << "sigma " << sigma << " y " << y;
          prev = cur;
        }
      }
    }
  }
}

TEST(LaplaceKernel, DomainErrors) {
  EXPECT_THROW((void)laplace_kernel(KernelFamily::D2, cplx(-1.0, 0.0), 1.0), DomainError);
  EXPECT_THROW((void)laplace_kernel(KernelFamily::D2, 1.0, 0.0), DomainError);
}

TEST(ShiftedKernel, Reductions) {
  const cplx s(2.0, 3.0);
  EXPECT_EQ(shifted_kernel(KernelFamily::D2, s, 0.7, 0.0), laplace_kernel(KernelFamily::D2, s, 0.7));
  EXPECT_EQ(shifted_kernel(KernelFamily::D3, cplx(1e4, 3e5), 0.7, 0.7),
            cplx(1.0 / (4.0 * kPi * 0.7), 0.0));
  EXPECT_THROW((void)shifted_kernel(KernelFamily::D2, s, 0.7, 0.71), DomainError);
  EXPECT_THROW((void)shifted_kernel(KernelFamily::D2, s, 0.7, -0.1), DomainError);
}

TEST(ShiftedKernel, EqualsExplicitShiftWhenRepresentable) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const cplx s(0.05 + 20.0 * u(rng), -40.0 + 80.0 * u(rng));
    const double r = 0.05 + 2.0 * u(rng);
    double t = r * u(rng);
    if (std::abs(s * t) > 30.0) t = 30.0 / std::abs(s) * u(rng);
    for (auto family : {KernelFamily::D2, KernelFamily::D3}) {
      const cplx direct = std::exp(s * t) * laplace_kernel(family, s, r);
      EXPECT_LT(rel_err(shifted_kernel(family, s, r, t), direct), 1e-12);
    }
  }
}

TEST(ShiftedKernel, FiniteWhereNaiveOrderingFails) {
  // Moderate |s|: compare against the 50-digit oracle with explicit factors.
  {
    const cplx s(30.0, 1.0);
    const double r = 1.0, t = 0.99;
    const auto z = oracle::to_mp(s * r);
    const auto ref = oracle::to_double(exp(oracle::to_mp(s) * oracle::mp_real(t)) *
                                       oracle::k0_scaled_series_mp(z) * exp(-z) /
                                       (2 * oracle::mp_pi()));
    EXPECT_LT(rel_err(shifted_kernel(KernelFamily::D2, s, r, t), ref), 1e-12);
  }
  // Large |s|: e^{s t} overflows and K_0(sr) underflows on their own.
  const cplx s(1000.0, 1.0);
  const double r = 1.0, t = 0.99;
  EXPECT_FALSE(std::isfinite(std::abs(std::exp(s * t))));
  const cplx v = shifted_kernel(KernelFamily::D2, s, r, t);
  EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
  EXPECT_GT(std::abs(v), 0.0);
}

TEST(TimeKernel2D, Values) {
  EXPECT_EQ(time_kernel_2d(0.5, 1.0), 0.0);
  EXPECT_NEAR(time_kernel_2d(2.0, 1.0), 1.0 / (2.0 * kPi * std::sqrt(3.0)), 1e-15);
  EXPECT_THROW((void)time_kernel_2d(1.0, 1.0), DomainError);
}

TEST(TimeKernel2D, IntegralMatchesInverseLaplaceOfKernelOverS) {
  // int_r^T k(t,r) dt = acosh(T/r)/(2 pi) in closed form; check the pair
  // against a Talbot inversion of K_0(sr)/(2 pi s).
  for (double r : {0.5, 1.0}) {
    for (double T : {1.5, 3.0, 7.0}) {
      const double closed = std::acosh(T / r) / (2.0 * kPi);
      const double talbot = oracle::talbot_inverse_k0_over_s(T, r);
      EXPECT_NEAR(talbot, closed, 1e-7) << "r " << r << " T " << T;
      // and the time kernel itself integrated numerically (substitution t = r cosh u)
      const int n = 4000;
      const double umax = std::acosh(T / r);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) * umax / n;
        const double t = r * std::cosh(u);
        acc += time_kernel_2d(t, r) * r * std::sinh(u) * umax / n;
      }
      EXPECT_NEAR(acc, closed, 1e-9);
    }
  }
}
