#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "wavecq/cq_core.hpp"
#include "wavecq/errors.hpp"

using namespace wavecq;

namespace {

const std::vector<Rule> kRules{Rule::BDF2, Rule::Trapezoidal};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const WeightSequence<cplx>& w) {
  double m = 0.0;
  for (const auto& x : w.weights) m = std::max(m, std::abs(x));
  return m;
}

// Taylor coefficients of dt/delta(zeta) in closed form:
//   BDF2: delta = (1-z)(3-z)/2, so 1/delta = 1/(1-z) - 1/(3-z) -> 1 - 3^{-(j+1)}
//   trapezoidal: (1+z)/(2(1-z)) -> 1/2, 1, 1, ...
double inverse_delta_coefficient(Rule rule, std::size_t j) {
  if (rule == Rule::BDF2) return 1.0 - std::pow(3.0, -static_cast<double>(j + 1));
  return j == 0 ? 0.5 : 1.0;
}

// Taylor coefficients of exp(-a delta(zeta)) from products of elementary
// series, without going through the library's power-series class.
std::vector<double> exp_minus_delta_oracle(Rule rule, double a, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (rule == Rule::BDF2) {
    // exp(-1.5a) exp(2a z) exp(-a z^2 / 2)
    std::vector<double> e1(n), e2(n, 0.0);
    double f = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) f *= 2.0 * a / static_cast<double>(k);
      e1[k] = f;
    }
    f = 1.0;
    for (std::size_t k = 0; 2 * k < n; ++k) {
      if (k > 0) f *= -0.5 * a / static_cast<double>(k);
      e2[2 * k] = f;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; i + j < n; ++j) out[i + j] += e1[i] * e2[j];
    for (auto& v : out) v *= std::exp(-1.5 * a);
  } else {
    // exp(-2a(1-z)/(1+z)) = exp(2a) exp(-4a/(1+z)); expand g = exp(c/(1+z)) via
    // (1+z)^2 g' = -c g, i.e. (n+1) g_{n+1} = -(2n g_n + (n-1) g_{n-1}) - c g_n.
    const double c = -4.0 * a;
    std::vector<double> g(n, 0.0);
    g[0] = std::exp(2.0 * a + c);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double prev = k >= 1 ? g[k - 1] : 0.0;
      const double km1 = static_cast<double>(k) - 1.0;
      g[k + 1] = (-(2.0 * static_cast<double>(k) * g[k] + (k >= 1 ? km1 * prev : 0.0)) - c * g[k]) /
                 static_cast<double>(k + 1);
    }
    out = g;
  }
  return out;
}

// int_0^t (t - u) u^4 sin u du
double twice_integrated(double t) {
  return -std::pow(t, 4) * std::sin(t) - 8.0 * std::pow(t, 3) * std::cos(t) +
         36.0 * t * t * std::sin(t) + 96.0 * t * std::cos(t) + 24.0 * t - 120.0 * std::sin(t);
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(DeltaAt, Examples) {
  EXPECT_EQ(delta_at(Rule::BDF2, 1.0), cplx(0.0));
  EXPECT_EQ(delta_at(Rule::BDF2, 0.0), cplx(1.5));
  EXPECT_EQ(delta_at(Rule::Trapezoidal, 0.0), cplx(2.0));
  EXPECT_EQ(delta_at(Rule::Trapezoidal, 1.0), cplx(0.0));
  EXPECT_THROW((void)delta_at(Rule::Trapezoidal, -1.0), PoleError);
}

TEST(DeltaAt, Consistency) {
  for (Rule rule : kRules) {
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const cplx z(0.1 * i / 20.0, 0.1 * j / 20.0);
        if (std::abs(z) > 0.1) continue;
        worst = std::max(worst, std::abs(delta_at(rule, std::exp(-z)) - z) / std::pow(std::abs(z), 3));
      }
    }
    EXPECT_LE(worst, 1.0) << to_string(rule);
  }
}

TEST(DeltaAt, AStability) {
  for (Rule rule : kRules) {
    for (double re : {1e-6, 1e-3, 0.1, 1.0, 10.0}) {
      for (double im = -40.0; im <= 40.0; im += 0.37) {
        EXPECT_GT(delta_at(rule, std::exp(-cplx(re, im))).real(), 0.0);
      }
    }
    EXPECT_TRUE(rule_is_a_stable(rule));
    EXPECT_EQ(rule_order(rule), 2);
  }
}

TEST(Rules, ParseAndName) {
  EXPECT_EQ(parse_rule("BDF2"), Rule::BDF2);
  EXPECT_EQ(parse_rule("trapezoidal"), Rule::Trapezoidal);
  EXPECT_EQ(parse_rule(to_string(Rule::Trapezoidal)), Rule::Trapezoidal);
  EXPECT_THROW((void)parse_rule("bdf3"), std::invalid_argument);
}

TEST(ChooseLambda, Examples) {
  EXPECT_NEAR(choose_lambda(0, 1e-16), 1e-8, 1e-22);
  EXPECT_NEAR(choose_lambda(511, std::ldexp(1.0, -52)), 0.9654133954938136, 1e-15);
  double prev = 0.0;
  for (std::size_t n : {1u, 4u, 16u, 64u, 256u, 4096u}) {
    const double l = choose_lambda(n, kMachineEps);
    EXPECT_GT(l, prev);
    EXPECT_LT(l, 1.0);
    prev = l;
  }
  EXPECT_THROW((void)choose_lambda(4, 1.5), std::invalid_argument);
}

TEST(TimeGrid, Construction) {
  const auto g = TimeGrid::with_final_time(8, 4.0);
  EXPECT_EQ(g.steps(), 8u);
  EXPECT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g.dt(), 0.5);
  EXPECT_DOUBLE_EQ(g.final_time(), 4.0);
  EXPECT_DOUBLE_EQ(g.time(3), 1.5);
  EXPECT_THROW(TimeGrid(4, 0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(TimeGrid(4, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW((void)TimeGrid::with_final_time(0, 1.0), std::invalid_argument);
}

TEST(CqFrequencies, SingleLevelExample) {
  const TimeGrid grid(0, 1.0, 0.5);
  const auto s = cq_frequencies(Rule::BDF2, grid);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(std::abs(s[0] - 0.625), 0.0, 1e-15);
}

TEST(CqFrequencies, PositiveRealPartsAndConjugatePairs) {
  for (Rule rule : kRules) {
    for (std::size_t n : {7u, 8u, 63u}) {
      const auto grid = TimeGrid::with_final_time(n, 2.0);
      const auto s = cq_frequencies(rule, grid);
      for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_GT(s[k].real(), 0.0);
        if (k > 0) {
          EXPECT_EQ(s[k], std::conj(s[s.size() - k]));
        }
      }
    }
  }
}

TEST(CqFrequencies, GrowthExponents) {
  for (Rule rule : kRules) {
    std::vector<double> x, y;
    for (std::size_t n = 64; n <= 1024; n *= 2) {
      const auto grid = TimeGrid::with_final_time(n, 1.0);
      const auto s = cq_frequencies(rule, grid);
      double m = 0.0;
      for (const auto& v : s) m = std::max(m, std::abs(v));
      x.push_back(std::log(1.0 / grid.dt()));
      y.push_back(std::log(m));
    }
    const double slope = fitted_slope(x, y);
    if (rule == Rule::BDF2) {
      EXPECT_GE(slope, 0.9);
      EXPECT_LE(slope, 1.1);
    } else {
      EXPECT_GE(slope, 1.8);
      EXPECT_LE(slope, 2.2);
    }
  }
}

TEST(ScalarWeightsFft, ConstantKernel) {
  const auto grid = TimeGrid::with_final_time(64, 1.0);
  const auto w = scalar_weights_fft([](cplx) { return cplx(1.0); }, Rule::BDF2, grid);
  const double tol = numerically_zero_tolerance(w, grid.eps());
  EXPECT_NEAR(std::abs(w[0] - 1.0), 0.0, tol);
  for (std::size_t j = 1; j < w.size(); ++j) EXPECT_LE(std::abs(w[j]), tol);
}

TEST(ScalarWeightsFft, InverseKernelMatchesClosedForm) {
  for (Rule rule : kRules) {
    const double dt = 0.05;
    const auto grid = TimeGrid::with_step(100, dt);
    const auto w = scalar_weights_fft([](cplx s) { return 1.0 / s; }, rule, grid);
    if (rule == Rule::BDF2) {
      EXPECT_NEAR(w[0].real(), 2.0 * dt / 3.0, 10.0 * std::sqrt(kMachineEps) * dt);
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
      EXPECT_NEAR(w[j].real(), dt * inverse_delta_coefficient(rule, j), 10.0 * std::sqrt(kMachineEps) * dt);
    }
  }
}

TEST(ScalarWeightsFft, DerivativeKernel) {
  const auto grid = TimeGrid::with_step(32, 1.0);
  const auto w = scalar_weights_fft([](cplx s) { return s; }, Rule::BDF2, grid);
  const double tol = numerically_zero_tolerance(w, grid.eps());
  EXPECT_NEAR(w[0].real(), 1.5, tol);
  EXPECT_NEAR(w[1].real(), -2.0, tol);
  EXPECT_NEAR(w[2].real(), 0.5, tol);
  for (std::size_t j = 3; j < w.size(); ++j) EXPECT_LE(std::abs(w[j]), tol);
}

TEST(ScalarWeightsFft, EvaluationFailureCarriesIndex) {
  const auto grid = TimeGrid::with_final_time(16, 1.0);
  const auto freqs = cq_frequencies(Rule::BDF2, grid);
  const cplx bad = freqs[5];
  try {
    (void)scalar_weights_fft(
        [bad](cplx s) {
          if (s == bad) throw std::runtime_error("boom");
          return 1.0 / s;
        },
        Rule::BDF2, grid);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.frequency_index(), 5u);
  }
}

TEST(ScalarWeightsExact, MatchesIndependentOracles) {
  const double dt = 0.1;
  const auto grid = TimeGrid::with_step(40, dt);
  for (Rule rule : kRules) {
    const auto inv = scalar_weights_exact({{1.0}, {0.0, 1.0}, 0.0}, rule, grid);
    for (std::size_t j = 0; j < inv.size(); ++j)
      EXPECT_NEAR(inv[j], dt * inverse_delta_coefficient(rule, j), 1e-15);

    const std::size_t m = 3;
    const auto e = scalar_weights_exact({{1.0}, {1.0}, m * dt}, rule, grid);
    const auto oracle = exp_minus_delta_oracle(rule, static_cast<double>(m), grid.size());
    for (std::size_t j = 0; j < e.size(); ++j) EXPECT_NEAR(e[j], oracle[j], 1e-13 * (1.0 + std::abs(oracle[j])));
  }
  // s^2 under BDF2: delta(z)^2 = (1.5 - 2z + 0.5z^2)^2
  const auto sq = scalar_weights_exact({{0.0, 0.0, 1.0}, {1.0}, 0.0}, Rule::BDF2, grid);
  const double expect[5] = {2.25, -6.0, 5.5, -2.0, 0.25};
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(sq[j] * dt * dt, expect[j], 1e-12);
  for (std::size_t j = 5; j < sq.size(); ++j) EXPECT_EQ(sq[j], 0.0);
}

TEST(ScalarWeightsExact, UnsupportedTransfers) {
  const auto grid = TimeGrid::with_step(8, 0.1);
  EXPECT_THROW((void)scalar_weights_exact({{}, {1.0}, 0.0}, Rule::BDF2, grid), UnsupportedTransfer);
  // 1/(s - 15) has its pole at delta(0)/dt = 15
  EXPECT_THROW((void)scalar_weights_exact({{1.0}, {-15.0, 1.0}, 0.0}, Rule::BDF2, grid),
               UnsupportedTransfer);
}

TEST(Weights, FftAgreesWithExactPath) {
  for (Rule rule : kRules) {
    for (std::size_t n : {32u, 128u, 256u}) {
      const auto grid = TimeGrid::with_final_time(n, 2.0);
      const double dt = grid.dt();
      const std::vector<SeriesTransfer> kernels{{{1.0}, {1.0}, 0.0},
                                                {{1.0}, {0.0, 1.0}, 0.0},
                                                {{0.0, 1.0}, {1.0}, 0.0},
                                                {{0.0, 0.0, 1.0}, {1.0}, 0.0},
                                                {{1.0}, {1.0}, 3.0 * dt}};
      for (const auto& k : kernels) {
        const auto fft = scalar_weights_fft(k, rule, grid);
        const auto exact = scalar_weights_exact(k, rule, grid);
        double scale = 0.0, diff = 0.0;
        for (std::size_t j = 0; j < exact.size(); ++j) {
          scale = std::max(scale, std::abs(exact[j]));
          diff = std::max(diff, std::abs(fft[j] - exact[j]));
        }
        EXPECT_LE(diff, 10.0 * std::sqrt(kMachineEps) * scale) << to_string(rule) << " N " << n;
      }
    }
  }
}

TEST(ModifiedSymbol, Reductions) {
  const auto grid = TimeGrid::with_final_time(16, 1.0);
  const TransferFunction k = [](cplx s) { return 1.0 / (1.0 + s); };
  const cplx z(0.3, 0.2);
  EXPECT_EQ(modified_symbol(k, 0, Rule::BDF2, grid, z), k(delta_at(Rule::BDF2, z) / grid.dt()));
  const cplx expect = 0.09 * std::exp(2.0 * delta_at(Rule::BDF2, 0.3));
  EXPECT_NEAR(std::abs(modified_symbol([](cplx) { return cplx(1.0); }, 2, Rule::BDF2, grid, 0.3) - expect),
              0.0, 1e-14 * std::abs(expect));
}

TEST(ModifiedWeights, CausalityExactAndFft) {
  for (Rule rule : kRules) {
    const auto grid = TimeGrid::with_final_time(128, 4.0);
    const double dt = grid.dt();
    for (std::size_t m : {1u, 4u, 17u}) {
      // K = e^{-sr}/(1+s) with r strictly between t_m and t_{m+1}
      const SeriesTransfer k{{1.0}, {1.0, 1.0}, (static_cast<double>(m) + 0.4) * dt};
      const auto exact = scalar_weights_exact(k, rule, grid, m);
      for (std::size_t j = 0; j < m; ++j) EXPECT_EQ(exact[j], 0.0);
      EXPECT_NE(exact[m], 0.0);

      const auto fft = modified_weights_fft(k, m, rule, grid);
      EXPECT_EQ(fft.shift, m);
      const double tol = numerically_zero_tolerance(fft, grid.eps());
      for (std::size_t j = 0; j < m; ++j) EXPECT_LE(std::abs(fft[j]), tol);
      double diff = 0.0, scale = 0.0;
      for (std::size_t j = 0; j < exact.size(); ++j) {
        diff = std::max(diff, std::abs(fft[j] - exact[j]));
        scale = std::max(scale, std::abs(exact[j]));
      }
      EXPECT_LE(diff, 10.0 * std::sqrt(kMachineEps) * scale);
    }
  }
}

TEST(ModifiedWeights, PureDelayBecomesShift) {
  const auto grid = TimeGrid::with_final_time(64, 2.0);
  const std::size_t m = 5;
  const double tm = static_cast<double>(m) * grid.dt();
  const auto w = modified_weights_fft([tm](cplx s) { return std::exp(-s * tm); }, m, Rule::BDF2, grid);
  for (std::size_t j = 0; j < w.size(); ++j) {
    EXPECT_NEAR(std::abs(w[j] - (j == m ? 1.0 : 0.0)), 0.0, 1e-6) << j;
  }
}

TEST(ApplyConvolution, IdentityWeights) {
  WeightSequence<double> w{std::vector<double>(6, 0.0), 0};
  w.weights[0] = 1.0;
  const std::vector<double> g{1.0, -2.0, 3.5, 0.0, 7.0, 1e-3};
  EXPECT_EQ(apply_convolution(w, g), g);

  std::vector<Eigen::VectorXd> gv(6, Eigen::VectorXd::Constant(3, 2.0));
  const auto out = apply_convolution(w, gv);
  for (const auto& v : out) EXPECT_EQ(v, gv[0]);
}

TEST(ApplyConvolution, DimensionMismatch) {
  WeightSequence<double> w{std::vector<double>(4, 1.0), 0};
  const std::vector<double> g(5, 1.0);
  EXPECT_THROW((void)apply_convolution(w, g), DimensionMismatch);
  WeightSequence<Eigen::MatrixXd> wm{std::vector<Eigen::MatrixXd>(2, Eigen::MatrixXd::Identity(2, 3)), 0};
  std::vector<Eigen::VectorXd> gv(2, Eigen::VectorXd::Zero(2));
  EXPECT_THROW((void)apply_convolution(wm, gv), DimensionMismatch);
}

TEST(ApplyConvolution, Bdf2DifferentiatesToSecondOrder) {
  auto g = [](double t) { return t * t * t * std::exp(-t); };
  auto dg = [](double t) { return (3.0 * t * t - t * t * t) * std::exp(-t); };
  std::vector<double> errs;
  for (std::size_t n : {160u, 320u, 640u}) {
    const auto grid = TimeGrid::with_final_time(n, 4.0);
    const auto w = scalar_weights_exact({{0.0, 1.0}, {1.0}, 0.0}, Rule::BDF2, grid);
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = g(grid.time(i));
    const auto d = apply_convolution(w, samples);
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) e = std::max(e, std::abs(d[i] - dg(grid.time(i))));
    errs.push_back(e);
  }
  EXPECT_LT(errs[0], 2e-3);
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
  }
}

TEST(ApplyConvolution, ModifiedWeightsOutputCausal) {
  const auto grid = TimeGrid::with_final_time(32, 1.0);
  const std::size_t m = 6;
  const auto w = scalar_weights_exact({{1.0}, {0.0, 1.0}, m * grid.dt()}, Rule::BDF2, grid, m);
  std::vector<double> g(grid.size(), 1.0);
  const auto out = apply_convolution(w, g);
  for (std::size_t n = 0; n < m; ++n) EXPECT_EQ(out[n], 0.0);
  EXPECT_GT(out[m], 0.0);
}

TEST(ApplyConvolution, SecondOrderForDoubleIntegral) {
  for (Rule rule : kRules) {
    std::vector<double> x, y;
    for (std::size_t n = 32; n <= 512; n *= 2) {
      const auto grid = TimeGrid::with_final_time(n, 4.0);
      const auto w = real_part(scalar_weights_fft([](cplx s) { return 1.0 / (s * s); }, rule, grid));
      std::vector<double> g(grid.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = grid.time(i);
        g[i] = std::sin(t) * std::pow(t, 4);
      }
      const auto u = apply_convolution(w, g);
      double e = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - twice_integrated(grid.time(i))));
      x.push_back(std::log(grid.dt()));
      y.push_back(std::log(e));
    }
    const double order = fitted_slope(x, y);
    EXPECT_GE(order, 1.8) << to_string(rule);
    EXPECT_LE(order, 2.2) << to_string(rule);
  }
}

TEST(ApplyConvolution, CompositionWithInverseRecoversData) {
  for (Rule rule : kRules) {
    const auto grid = TimeGrid::with_final_time(200, 5.0);
    const auto a = real_part(scalar_weights_fft([](cplx s) { return (s + 1.0) / (s + 2.0) / s; }, rule, grid));
    const auto b = real_part(scalar_weights_fft([](cplx s) { return s * (s + 2.0) / (s + 1.0); }, rule, grid));
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sin(3.0 * grid.time(i)) + 0.5;
    const auto back = apply_convolution(b, apply_convolution(a, g));
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(back[i] - g[i]));
    EXPECT_LE(e, 100.0 * std::sqrt(kMachineEps) * max_abs(g)) << to_string(rule);
  }
}

TEST(RealPart, DropsImaginaryParts) {
  WeightSequence<cplx> w{{cplx(1.0, 1e-17), cplx(-2.0, 3.0)}, 1};
  const auto r = real_part(w);
  EXPECT_EQ(r.shift, 1u);
  EXPECT_EQ(r.weights, (std::vector<double>{1.0, -2.0}));
  EXPECT_DOUBLE_EQ(max_abs(w), std::abs(cplx(-2.0, 3.0)));
}
