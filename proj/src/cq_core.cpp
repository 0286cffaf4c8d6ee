#include "wavecq/cq_core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wavecq/dft.hpp"
#include "wavecq/errors.hpp"
#include "wavecq/power_series.hpp"

namespace wavecq {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::BDF2: return "bdf2";
    case Rule::Trapezoidal: return "trapezoidal";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bdf2") return Rule::BDF2;
  if (lower == "trapezoidal" || lower == "trap") return Rule::Trapezoidal;
  throw std::invalid_argument("unknown multistep rule '" + std::string(name) + "'");
}

cplx delta_at(Rule rule, cplx zeta) {
  switch (rule) {
    case Rule::BDF2: {
      const cplx a = 1.0 - zeta;
      return a + 0.5 * a * a;
    }
    case Rule::Trapezoidal:
      if (zeta == cplx(-1.0, 0.0)) throw PoleError("trapezoidal generating function has a pole at -1");
      return 2.0 * (1.0 - zeta) / (1.0 + zeta);
  }
  throw std::logic_error("unhandled rule");
}

double choose_lambda(std::size_t steps, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("choose_lambda: eps must lie in (0,1)");
  return std::pow(eps, 1.0 / (2.0 * static_cast<double>(steps + 1)));
}

TimeGrid::TimeGrid(std::size_t steps, double dt, double lambda, double eps)
    : steps_(steps), dt_(dt), lambda_(lambda), eps_(eps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("TimeGrid: contour radius must lie in (0,1)");
  }
}

TimeGrid TimeGrid::with_final_time(std::size_t steps, double final_time, double eps) {
  if (steps == 0) throw std::invalid_argument("TimeGrid: a final time needs at least one step");
  return {steps, final_time / static_cast<double>(steps), choose_lambda(steps, eps), eps};
}

TimeGrid TimeGrid::with_step(std::size_t steps, double dt, double eps) {
  return {steps, dt, choose_lambda(steps, eps), eps};
}

std::vector<cplx> contour_points(const TimeGrid& grid) {
  const std::size_t L = grid.size();
  std::vector<cplx> z(L);
  const double lambda = grid.lambda();
  for (std::size_t k = 0; 2 * k <= L; ++k) {
    if (k == 0) {
      z[0] = lambda;
    } else if (2 * k == L) {
      z[k] = -lambda;
    } else {
      z[k] = std::polar(lambda, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(L));
    }
  }
  for (std::size_t k = L / 2 + 1; k < L; ++k) z[k] = std::conj(z[L - k]);
  return z;
}

std::vector<cplx> cq_frequencies(Rule rule, const TimeGrid& grid) {
  auto z = contour_points(grid);
  for (auto& v : z) v = delta_at(rule, v) / grid.dt();
  return z;
}

WeightSequence<cplx> weights_from_symbol(const ContourSymbol& symbol, const TimeGrid& grid,
                                         std::size_t shift) {
  const auto z = contour_points(grid);
  std::vector<cplx> values(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) {
    try {
      values[l] = symbol(z[l]);
    } catch (const EvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluationError(l, e.what());
    }
  }
  auto w = dft::inverse(values);
  double scale = 1.0;
  for (auto& v : w) {
    v *= scale;
    scale /= grid.lambda();
  }
  return {std::move(w), shift};
}

WeightSequence<cplx> scalar_weights_fft(const TransferFunction& kernel, Rule rule,
                                        const TimeGrid& grid) {
  const double dt = grid.dt();
  return weights_from_symbol([&](cplx zeta) { return kernel(delta_at(rule, zeta) / dt); }, grid);
}

cplx modified_symbol(const TransferFunction& kernel, std::size_t shift, Rule rule,
                     const TimeGrid& grid, cplx zeta) {
  const cplx d = delta_at(rule, zeta);
  const cplx k = kernel(d / grid.dt());
  if (shift == 0) return k;
  const double m = static_cast<double>(shift);
  return std::pow(zeta, static_cast<int>(shift)) * std::exp(m * d) * k;
}

WeightSequence<cplx> modified_weights_fft(const TransferFunction& kernel, std::size_t shift,
                                          Rule rule, const TimeGrid& grid) {
  return weights_from_symbol(
      [&](cplx zeta) { return modified_symbol(kernel, shift, rule, grid, zeta); }, grid, shift);
}

cplx SeriesTransfer::operator()(cplx s) const {
  auto horner = [&](const std::vector<double>& p) {
    cplx acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
    return acc;
  };
  cplx value = horner(numerator) / horner(denominator);
  if (delay != 0.0) value *= std::exp(-delay * s);
  return value;
}

namespace {

PowerSeries delta_series(Rule rule, double dt, std::size_t order) {
  PowerSeries d(order);
  switch (rule) {
    case Rule::BDF2: {
      const double c[3] = {1.5, -2.0, 0.5};
      for (std::size_t k = 0; k < std::min<std::size_t>(3, order); ++k) d[k] = c[k];
      break;
    }
    case Rule::Trapezoidal:
      // 2(1-z)/(1+z) = 2 + sum_{k>=1} 4(-1)^k z^k
      for (std::size_t k = 0; k < order; ++k) d[k] = k == 0 ? 2.0 : (k % 2 == 0 ? 4.0 : -4.0);
      break;
  }
  return d * (1.0 / dt);
}

}  // namespace

WeightSequence<double> scalar_weights_exact(const SeriesTransfer& kernel, Rule rule,
                                            const TimeGrid& grid, std::size_t shift) {
  if (kernel.numerator.empty() || kernel.denominator.empty()) {
    throw UnsupportedTransfer("series transfer needs non-empty numerator and denominator");
  }
  const std::size_t order = grid.size();
  const PowerSeries d = delta_series(rule, grid.dt(), order);
  const PowerSeries num = d.compose_polynomial(kernel.numerator);
  const PowerSeries den = d.compose_polynomial(kernel.denominator);
  if (den[0] == 0.0) {
    throw UnsupportedTransfer("denominator vanishes at delta(0)/dt; no Taylor expansion at zeta = 0");
  }
  PowerSeries k = num / den;
  // e^{m delta} and e^{-delay s} share the exponent; fold them before expanding.
  const double exponent = static_cast<double>(shift) * grid.dt() - kernel.delay;
  if (exponent != 0.0) k = k * exp(d * exponent);
  k = k.shifted(shift);
  auto c = k.coefficients();
  return {std::vector<double>(c.begin(), c.end()), shift};
}

WeightSequence<double> real_part(const WeightSequence<cplx>& w) {
  WeightSequence<double> out{std::vector<double>(w.size()), w.shift};
  for (std::size_t j = 0; j < w.size(); ++j) out.weights[j] = w[j].real();
  return out;
}

double numerically_zero_tolerance(const WeightSequence<cplx>& w, double eps) {
  double scale = 0.0;
  for (const auto& v : w.weights) scale = std::max(scale, std::abs(v));
  return 100.0 * std::sqrt(eps) * scale;
}

std::vector<double> apply_convolution(const WeightSequence<double>& w, std::span<const double> g) {
  if (g.size() != w.size()) {
    throw DimensionMismatch("apply_convolution: " + std::to_string(g.size()) + " samples for " +
                            std::to_string(w.size()) + " weights");
  }
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) acc += w[n - j] * g[j];
    out[n] = acc;
  }
  return out;
}

std::vector<Eigen::VectorXd> apply_convolution(const WeightSequence<double>& w,
                                               std::span<const Eigen::VectorXd> g) {
  if (g.size() != w.size()) {
    throw DimensionMismatch("apply_convolution: " + std::to_string(g.size()) + " samples for " +
                            std::to_string(w.size()) + " weights");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(g[n].size());
    for (std::size_t j = 0; j <= n; ++j) {
      if (g[j].size() != acc.size()) throw DimensionMismatch("apply_convolution: ragged samples");
      acc += w[n - j] * g[j];
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<Eigen::VectorXd> apply_convolution(const WeightSequence<Eigen::MatrixXd>& w,
                                               std::span<const Eigen::VectorXd> g) {
  if (g.size() != w.size()) {
    throw DimensionMismatch("apply_convolution: " + std::to_string(g.size()) + " samples for " +
                            std::to_string(w.size()) + " weights");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(w[0].rows());
    for (std::size_t j = 0; j <= n; ++j) {
      const auto& wj = w[n - j];
      if (wj.cols() != g[j].size() || wj.rows() != acc.size()) {
        throw DimensionMismatch("apply_convolution: weight matrix does not match sample size");
      }
      acc.noalias() += wj * g[j];
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace wavecq
