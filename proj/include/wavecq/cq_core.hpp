#pragma once

// Convolution quadrature in time: generating functions of the two A-stable
// multistep rules, the scaled contour |zeta| = lambda, convolution weights
// (standard and shifted/modified) and scalar discrete convolution.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wavecq/common.hpp"

namespace wavecq {

enum class Rule { BDF2, Trapezoidal };

[[nodiscard]] std::string_view to_string(Rule rule);
/// Accepts "bdf2" and "trapezoidal" (case-insensitive).
[[nodiscard]] Rule parse_rule(std::string_view name);

/// Both shipped rules are second order and A-stable.
[[nodiscard]] constexpr int rule_order(Rule) noexcept { return 2; }
[[nodiscard]] constexpr bool rule_is_a_stable(Rule) noexcept { return true; }

/// delta(zeta): BDF2 (1-z) + (1-z)^2/2, trapezoidal 2(1-z)/(1+z).
/// Throws PoleError for the trapezoidal rule at zeta = -1.
[[nodiscard]] cplx delta_at(Rule rule, cplx zeta);

/// lambda = eps^{1/(2(N+1))}; the contour radius that balances aliasing
/// (lambda^{N+1}) against roundoff amplification (lambda^{-N}).
[[nodiscard]] double choose_lambda(std::size_t steps, double eps);

/// Uniform time grid t_n = n dt, n = 0..N, together with the contour radius.
class TimeGrid {
 public:
  /// Throws std::invalid_argument unless dt > 0 and 0 < lambda < 1.
  TimeGrid(std::size_t steps, double dt, double lambda, double eps = kMachineEps);

  static TimeGrid with_final_time(std::size_t steps, double final_time, double eps = kMachineEps);
  static TimeGrid with_step(std::size_t steps, double dt, double eps = kMachineEps);

  [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
  /// Number of time levels, N + 1.
  [[nodiscard]] std::size_t size() const noexcept { return steps_ + 1; }
  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] double final_time() const noexcept { return dt_ * static_cast<double>(steps_); }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double eps() const noexcept { return eps_; }
  [[nodiscard]] double time(std::size_t n) const noexcept { return dt_ * static_cast<double>(n); }

 private:
  std::size_t steps_;
  double dt_;
  double lambda_;
  double eps_;
};

/// Contour points z_k = lambda zeta_{N+1}^{-k}, k = 0..N. Points with
/// k > (N+1)/2 are stored as exact conjugates of z_{N+1-k}.
[[nodiscard]] std::vector<cplx> contour_points(const TimeGrid& grid);

/// s_k = delta(z_k)/dt for every contour point.
[[nodiscard]] std::vector<cplx> cq_frequencies(Rule rule, const TimeGrid& grid);

/// Weights w_0..w_N. Modified sequences carry the shift m below which the
/// weights vanish.
template <class T>
struct WeightSequence {
  std::vector<T> weights;
  std::size_t shift = 0;

  [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
  const T& operator[](std::size_t j) const { return weights[j]; }
};

using TransferFunction = std::function<cplx(cplx)>;
using ContourSymbol = std::function<cplx(cplx)>;

/// Trapezoidal-rule approximation of the Cauchy integral on |zeta| = lambda:
///   w_j = lambda^{-j}/(N+1) sum_l symbol(z_l) zeta_{N+1}^{lj}.
/// Exceptions thrown by `symbol` are rethrown as EvaluationError carrying the
/// contour index.
[[nodiscard]] WeightSequence<cplx> weights_from_symbol(const ContourSymbol& symbol,
                                                       const TimeGrid& grid,
                                                       std::size_t shift = 0);

/// Standard CQ weights of K via one inverse DFT.
[[nodiscard]] WeightSequence<cplx> scalar_weights_fft(const TransferFunction& kernel, Rule rule,
                                                      const TimeGrid& grid);

/// zeta^m e^{m delta(zeta)} K(delta(zeta)/dt).
[[nodiscard]] cplx modified_symbol(const TransferFunction& kernel, std::size_t shift, Rule rule,
                                   const TimeGrid& grid, cplx zeta);

/// Modified weights of K with shift m through the contour FFT. The exponential
/// factor is multiplied in directly, so K must decay at least like e^{-s m dt}
/// on the contour for the result to be representable.
[[nodiscard]] WeightSequence<cplx> modified_weights_fft(const TransferFunction& kernel,
                                                        std::size_t shift, Rule rule,
                                                        const TimeGrid& grid);

/// K(s) = P(s)/Q(s) exp(-delay s) with real polynomial coefficients in
/// ascending powers of s. Closed under the operations the series oracle needs.
struct SeriesTransfer {
  std::vector<double> numerator{1.0};
  std::vector<double> denominator{1.0};
  double delay = 0.0;

  [[nodiscard]] cplx operator()(cplx s) const;
};

/// Exact Taylor coefficients of zeta^m e^{m delta} K(delta(zeta)/dt) through
/// order N by power-series arithmetic. For shift 0 these are the standard
/// weights. Throws UnsupportedTransfer when Q(delta(0)/dt) = 0 or a polynomial
/// is empty.
[[nodiscard]] WeightSequence<double> scalar_weights_exact(const SeriesTransfer& kernel, Rule rule,
                                                          const TimeGrid& grid,
                                                          std::size_t shift = 0);

/// Real parts of a weight sequence (the imaginary parts of weights of a real
/// kernel are roundoff).
[[nodiscard]] WeightSequence<double> real_part(const WeightSequence<cplx>& w);

/// 100 sqrt(eps) max_j |w_j|: weights below this are numerically zero.
[[nodiscard]] double numerically_zero_tolerance(const WeightSequence<cplx>& w, double eps);

/// Partial sums sum_{j<=n} w_{n-j} g_j for n = 0..N. Throws DimensionMismatch
/// when g and w have different lengths or incompatible element sizes.
[[nodiscard]] std::vector<double> apply_convolution(const WeightSequence<double>& w,
                                                    std::span<const double> g);
[[nodiscard]] std::vector<Eigen::VectorXd> apply_convolution(const WeightSequence<double>& w,
                                                             std::span<const Eigen::VectorXd> g);
[[nodiscard]] std::vector<Eigen::VectorXd> apply_convolution(
    const WeightSequence<Eigen::MatrixXd>& w, std::span<const Eigen::VectorXd> g);

}  // namespace wavecq
