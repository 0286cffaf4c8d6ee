#pragma once

// Fully discrete time stepping: the all-at-once solve through N+1 decoupled
// frequency-domain systems, marching-on-in-time with precomputed matrix
// weights, complex least squares, and field evaluation at observation points.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wavecq/assembly.hpp"
#include "wavecq/common.hpp"
#include "wavecq/cq_core.hpp"

namespace wavecq {

enum class Scheme { Standard, Modified };

[[nodiscard]] std::string_view to_string(Scheme scheme);
/// Accepts "standard" and "modified" (case-insensitive).
[[nodiscard]] Scheme parse_scheme(std::string_view name);

/// Matrix of the frequency-domain system at contour point zeta = z_k.
using FrequencyAssembler = std::function<Eigen::MatrixXcd(std::size_t k, cplx zeta)>;

inline constexpr double kDefaultRankTol = 1e-12;

struct LeastSquaresInfo {
  Eigen::Index rank = 0;
  /// |R_00| / |R_rr| of the retained block of the pivoted factorization.
  double condition = 1.0;
};

/// Minimal-residual solution of A x = b by a complete orthogonal
/// decomposition. Directions whose pivots fall below rank_tol times the
/// largest are truncated. Throws DimensionMismatch if b.size() != A.rows().
[[nodiscard]] Eigen::VectorXcd least_squares(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                                             double rank_tol = kDefaultRankTol,
                                             LeastSquaresInfo* info = nullptr);

struct DensityHistory {
  std::vector<Eigen::VectorXd> phi;
  /// Largest imaginary magnitude dropped when returning to the time domain.
  double residual_imag = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return phi.size(); }
  [[nodiscard]] double max_abs() const;
  /// residual_imag > 1e-6 max|phi|: the discretisation is unstable or the
  /// data were not real.
  [[nodiscard]] bool imag_warning() const;
};

struct FrequencyRecord {
  std::size_t index = 0;
  cplx zeta;
  /// |A x - b| / |b| (zero for b = 0).
  double residual = 0.0;
  double condition = 1.0;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
};

struct SolveReport {
  std::string scheme = "custom";
  std::string rule = "custom";
  std::size_t steps = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool half_solve = true;
  std::size_t workers = 1;
  double wall_seconds = 0.0;
  double residual_imag = 0.0;
  bool imag_warning = false;
  std::vector<FrequencyRecord> records;

  [[nodiscard]] std::size_t rank_deficient_count() const;
  [[nodiscard]] double max_residual() const;
  /// `key = value` lines followed by one line per frequency.
  [[nodiscard]] std::string to_text() const;
};

enum class LinearSolver {
  /// LU for square systems, least squares otherwise.
  Auto,
  LeastSquares,
  Square,
};

struct SolveOptions {
  /// Solve only k = 0..floor((N+1)/2) and fill the rest by conjugation
  /// (valid for real data and real kernels).
  bool exploit_symmetry = true;
  /// 0 selects default_worker_count().
  std::size_t workers = 0;
  double rank_tol = kDefaultRankTol;
  LinearSolver solver = LinearSolver::Auto;
};

struct SolveResult {
  DensityHistory density;
  SolveReport report;
};

/// ghat_k = sum_n lambda^n g_n zeta^{-kn}; A(z_k) phihat_k = ghat_k;
/// phi_l = Re lambda^{-l}/(N+1) sum_k phihat_k zeta^{lk}.
/// Throws DimensionMismatch for a right-hand side of the wrong length or
/// size, and SingularSystem (with the frequency index) when a square
/// system is numerically singular.
[[nodiscard]] SolveResult all_at_once_solve(const FrequencyAssembler& assembler,
                                            const std::vector<Eigen::VectorXd>& rhs,
                                            const TimeGrid& grid, const SolveOptions& options = {});

/// V(delta(zeta)/dt) or its entrywise shifted counterpart.
[[nodiscard]] FrequencyAssembler system_assembler(const SpatialSystem& system, Scheme scheme, Rule rule,
                                                  const TimeGrid& grid);

/// Standard or modified observation matrices; with shift_observation = false
/// the modified scheme still evaluates the field with standard weights.
[[nodiscard]] FrequencyAssembler observation_assembler(const SpatialSystem& system,
                                                       const std::vector<Point>& points, Scheme scheme,
                                                       Rule rule, const TimeGrid& grid,
                                                       bool shift_observation = true);

[[nodiscard]] SolveResult all_at_once_solve(const SpatialSystem& system, Scheme scheme, Rule rule,
                                            const std::vector<Eigen::VectorXd>& rhs, const TimeGrid& grid,
                                            const SolveOptions& options = {});

/// Convolution weights W_0..W_N of a matrix-valued symbol through one inverse
/// DFT per entry. Imaginary parts are dropped; their maximum is written to
/// `imag_residual` if given.
[[nodiscard]] WeightSequence<Eigen::MatrixXd> matrix_weights_fft(const FrequencyAssembler& assembler,
                                                                 const TimeGrid& grid, std::size_t workers = 0,
                                                                 double* imag_residual = nullptr);

/// Forward substitution phi_n = lstsq(W_0, g_n - sum_{l<n} W_{n-l} phi_l).
/// Throws MotInfeasible when W_0 is numerically zero (below
/// 100 sqrt(eps) max_j |W_j|) or sigma_min(W_0) < rank_tol sigma_max(W_0).
[[nodiscard]] DensityHistory mot_solve(const WeightSequence<Eigen::MatrixXd>& weights,
                                       const std::vector<Eigen::VectorXd>& rhs,
                                       double rank_tol = kDefaultRankTol);

/// u(t_n, X_l): rows are time levels, columns observation points.
struct FieldHistory {
  Eigen::MatrixXd values;
  double dt = 0.0;
  double residual_imag = 0.0;

  [[nodiscard]] std::size_t steps() const noexcept {
    return values.rows() == 0 ? 0 : static_cast<std::size_t>(values.rows() - 1);
  }
  [[nodiscard]] std::size_t points() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// uhat_k = S(z_k) phihat_k followed by the inverse transform.
[[nodiscard]] FieldHistory evaluate_field(const DensityHistory& density, const FrequencyAssembler& observation,
                                          const TimeGrid& grid, std::size_t workers = 0);

[[nodiscard]] FieldHistory evaluate_field(const DensityHistory& density, const SpatialSystem& system,
                                          const std::vector<Point>& points, Scheme scheme, Rule rule,
                                          const TimeGrid& grid, bool shift_observation = true,
                                          std::size_t workers = 0);

/// Fine steps per coarse step. Throws GridMismatch unless the coarse time
/// levels are a subset of the fine ones.
[[nodiscard]] std::size_t refinement_ratio(std::size_t coarse_steps, double coarse_dt, std::size_t fine_steps,
                                           double fine_dt);

/// max over (n, l) of |u_h(t_n, X_l) - u_ref(t_n, X_l)|, u_ref possibly on a
/// nested finer grid. Throws GridMismatch for misaligned grids and
/// DimensionMismatch for different observation sets.
[[nodiscard]] double max_error(const FieldHistory& u_h, const FieldHistory& u_ref);

}  // namespace wavecq
