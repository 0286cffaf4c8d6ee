#include "wavecq/solver.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

#include "wavecq/dft.hpp"
#include "wavecq/errors.hpp"
#include "wavecq/parallel.hpp"

namespace wavecq {

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Standard ? "standard" : "modified";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "standard") return Scheme::Standard;
  if (lower == "modified") return Scheme::Modified;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Least squares

Eigen::VectorXcd least_squares(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b, double rank_tol,
                               LeastSquaresInfo* info) {
  if (b.size() != A.rows()) throw DimensionMismatch("least_squares: right-hand side length differs from rows");
  if (A.cols() == 0) return Eigen::VectorXcd(0);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A.rows(), A.cols());
  cod.setThreshold(rank_tol);
  cod.compute(A);
  Eigen::VectorXcd x = cod.rank() == 0 ? Eigen::VectorXcd::Zero(A.cols()).eval() : cod.solve(b).eval();
  if (info != nullptr) {
    info->rank = cod.rank();
    if (cod.rank() > 0) {
      const auto diag = cod.matrixT().diagonal().head(cod.rank()).cwiseAbs();
      info->condition = diag.maxCoeff() / diag.minCoeff();
    } else {
      info->condition = std::numeric_limits<double>::infinity();
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Histories and reports

double DensityHistory::max_abs() const {
  double m = 0.0;
  for (const auto& v : phi)
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

bool DensityHistory::imag_warning() const { return residual_imag > 1e-6 * max_abs(); }

std::size_t SolveReport::rank_deficient_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const FrequencyRecord& r) { return r.rank_deficient; }));
}

double SolveReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.residual);
  return m;
}

std::string SolveReport::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "scheme = " << scheme << "\n"
      << "rule = " << rule << "\n"
      << "steps = " << steps << "\n"
      << "rows = " << rows << "\n"
      << "cols = " << cols << "\n"
      << "half_solve = " << (half_solve ? "true" : "false") << "\n"
      << "workers = " << workers << "\n"
      << "wall_seconds = " << wall_seconds << "\n"
      << "residual_imag = " << residual_imag << "\n"
      << "imag_warning = " << (imag_warning ? "true" : "false") << "\n"
      << "solved_frequencies = " << records.size() << "\n"
      << "rank_deficient_frequencies = " << rank_deficient_count() << "\n"
      << "max_residual = " << max_residual() << "\n"
      << "# index zeta_re zeta_im residual condition rank\n";
  for (const auto& r : records) {
    out << r.index << ' ' << r.zeta.real() << ' ' << r.zeta.imag() << ' ' << r.residual << ' ' << r.condition
        << ' ' << r.rank << "\n";
  }
  return out.str();
}

namespace {

using Clock = std::chrono::steady_clock;

// Number of independent frequencies when conjugates are filled in.
std::size_t solve_count(std::size_t levels, bool symmetric) { return symmetric ? levels / 2 + 1 : levels; }

// Rows n of the result hold lambda^n v_n^T, forward transformed along n.
Eigen::MatrixXcd to_frequency(const std::vector<Eigen::VectorXd>& series, Eigen::Index width, double lambda) {
  const auto L = static_cast<Eigen::Index>(series.size());
  Eigen::MatrixXcd data(L, width);
  double scale = 1.0;
  for (Eigen::Index n = 0; n < L; ++n) {
    data.row(n) = (scale * series[static_cast<std::size_t>(n)]).transpose().cast<cplx>();
    scale *= lambda;
  }
  dft::forward_columns(data);
  return data;
}

// Inverse transform along rows, undo the lambda scaling, keep real parts.
Eigen::MatrixXd to_time(Eigen::MatrixXcd data, double lambda, double& residual_imag) {
  dft::inverse_columns(data);
  Eigen::MatrixXd out(data.rows(), data.cols());
  residual_imag = 0.0;
  double scale = 1.0;
  for (Eigen::Index n = 0; n < data.rows(); ++n) {
    const Eigen::RowVectorXcd row = data.row(n) / scale;
    out.row(n) = row.real();
    if (row.size() > 0) residual_imag = std::max(residual_imag, row.imag().cwiseAbs().maxCoeff());
    scale *= lambda;
  }
  return out;
}

void fill_conjugates(Eigen::MatrixXcd& data, std::size_t solved) {
  const auto L = data.rows();
  for (Eigen::Index k = static_cast<Eigen::Index>(solved); k < L; ++k) data.row(k) = data.row(L - k).conjugate();
}

}  // namespace

SolveResult all_at_once_solve(const FrequencyAssembler& assembler, const std::vector<Eigen::VectorXd>& rhs,
                              const TimeGrid& grid, const SolveOptions& options) {
  const auto start = Clock::now();
  if (rhs.size() != grid.size()) throw DimensionMismatch("all_at_once_solve: right-hand side needs N+1 vectors");
  const Eigen::Index rows = rhs.front().size();
  for (const auto& g : rhs)
    if (g.size() != rows) throw DimensionMismatch("all_at_once_solve: right-hand side vectors differ in length");

  const auto zetas = contour_points(grid);
  const std::size_t levels = grid.size();
  const std::size_t count = solve_count(levels, options.exploit_symmetry);
  const std::size_t workers = options.workers == 0 ? default_worker_count() : options.workers;

  Eigen::MatrixXcd ghat = to_frequency(rhs, rows, grid.lambda());
  fill_conjugates(ghat, solve_count(levels, true));

  // The first solve fixes the number of unknowns.
  std::vector<Eigen::VectorXcd> phihat(levels);
  std::vector<FrequencyRecord> records(count);
  Eigen::Index cols = -1;
  auto solve_one = [&](std::size_t k) {
    const Eigen::MatrixXcd A = assembler(k, zetas[k]);
    if (A.rows() != rows) throw DimensionMismatch("all_at_once_solve: system rows differ from data length");
    const Eigen::VectorXcd b = ghat.row(static_cast<Eigen::Index>(k)).transpose();
    FrequencyRecord rec;
    rec.index = k;
    rec.zeta = zetas[k];
    Eigen::VectorXcd x;
    const bool square = options.solver == LinearSolver::Square ||
                        (options.solver == LinearSolver::Auto && A.rows() == A.cols());
    if (square) {
      if (A.rows() != A.cols()) throw DimensionMismatch("all_at_once_solve: square solver needs a square system");
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
      const double rcond = lu.rcond();
      if (!(rcond > kMachineEps)) throw SingularSystem(k, "reciprocal condition estimate " + std::to_string(rcond));
      x = lu.solve(b);
      rec.condition = 1.0 / rcond;
      rec.rank = A.cols();
    } else {
      LeastSquaresInfo info;
      x = least_squares(A, b, options.rank_tol, &info);
      rec.condition = info.condition;
      rec.rank = info.rank;
      rec.rank_deficient = info.rank < A.cols();
    }
    const double bn = b.norm();
    rec.residual = bn > 0.0 ? (A * x - b).norm() / bn : (A * x).norm();
    phihat[k] = std::move(x);
    records[k] = rec;
  };
  // Solve k = 0 first so that the column count is known before the pool runs.
  solve_one(0);
  cols = phihat[0].size();
  parallel_for(count - 1, workers, [&](std::size_t i) { solve_one(i + 1); });

  Eigen::MatrixXcd spectrum(static_cast<Eigen::Index>(levels), cols);
  for (std::size_t k = 0; k < count; ++k) {
    if (phihat[k].size() != cols) throw DimensionMismatch("all_at_once_solve: systems differ in column count");
    spectrum.row(static_cast<Eigen::Index>(k)) = phihat[k].transpose();
  }
  if (options.exploit_symmetry) fill_conjugates(spectrum, count);

  SolveResult result;
  const Eigen::MatrixXd phi = to_time(std::move(spectrum), grid.lambda(), result.density.residual_imag);
  result.density.phi.resize(levels);
  for (std::size_t n = 0; n < levels; ++n) result.density.phi[n] = phi.row(static_cast<Eigen::Index>(n)).transpose();

  auto& rep = result.report;
  rep.steps = grid.steps();
  rep.rows = static_cast<std::size_t>(rows);
  rep.cols = static_cast<std::size_t>(cols);
  rep.half_solve = options.exploit_symmetry;
  rep.workers = workers;
  rep.records = std::move(records);
  rep.residual_imag = result.density.residual_imag;
  rep.imag_warning = result.density.imag_warning();
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

FrequencyAssembler system_assembler(const SpatialSystem& system, Scheme scheme, Rule rule, const TimeGrid& grid) {
  if (scheme == Scheme::Standard) {
    return [&system, rule, dt = grid.dt()](std::size_t, cplx zeta) {
      return system.system_matrix(delta_at(rule, zeta) / dt);
    };
  }
  auto shifts = std::make_shared<const ShiftData>(system.system_shifts(grid.dt()));
  return [&system, rule, grid, shifts](std::size_t, cplx zeta) {
    return assemble_modified(system, *shifts, rule, grid, zeta);
  };
}

FrequencyAssembler observation_assembler(const SpatialSystem& system, const std::vector<Point>& points,
                                         Scheme scheme, Rule rule, const TimeGrid& grid, bool shift_observation) {
  if (scheme == Scheme::Standard || !shift_observation) {
    return [&system, points, rule, dt = grid.dt()](std::size_t, cplx zeta) {
      return assemble_observation(system, points, delta_at(rule, zeta) / dt);
    };
  }
  auto shifts = std::make_shared<const ShiftData>(system.observation_shifts(points, grid.dt()));
  return [&system, points, rule, grid, shifts](std::size_t, cplx zeta) {
    return assemble_modified_observation(system, points, *shifts, rule, grid, zeta);
  };
}

SolveResult all_at_once_solve(const SpatialSystem& system, Scheme scheme, Rule rule,
                              const std::vector<Eigen::VectorXd>& rhs, const TimeGrid& grid,
                              const SolveOptions& options) {
  SolveResult result = all_at_once_solve(system_assembler(system, scheme, rule, grid), rhs, grid, options);
  result.report.scheme = std::string(to_string(scheme));
  result.report.rule = std::string(to_string(rule));
  return result;
}

// ---------------------------------------------------------------------------
// Marching on in time

WeightSequence<Eigen::MatrixXd> matrix_weights_fft(const FrequencyAssembler& assembler, const TimeGrid& grid,
                                                   std::size_t workers, double* imag_residual) {
  const auto zetas = contour_points(grid);
  const std::size_t levels = grid.size();
  const std::size_t count = solve_count(levels, true);
  std::vector<Eigen::MatrixXcd> mats(count);
  mats[0] = assembler(0, zetas[0]);
  const Eigen::Index rows = mats[0].rows();
  const Eigen::Index cols = mats[0].cols();
  parallel_for(count - 1, workers, [&](std::size_t i) { mats[i + 1] = assembler(i + 1, zetas[i + 1]); });

  Eigen::MatrixXcd data(static_cast<Eigen::Index>(levels), rows * cols);
  for (std::size_t k = 0; k < count; ++k) {
    if (mats[k].rows() != rows || mats[k].cols() != cols) {
      throw DimensionMismatch("matrix_weights_fft: symbol changes size along the contour");
    }
    data.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::RowVectorXcd>(mats[k].data(), rows * cols);
  }
  fill_conjugates(data, count);
  dft::inverse_columns(data);

  WeightSequence<Eigen::MatrixXd> w;
  w.weights.resize(levels);
  double imag = 0.0;
  double scale = 1.0;
  for (std::size_t j = 0; j < levels; ++j) {
    const Eigen::RowVectorXcd row = data.row(static_cast<Eigen::Index>(j)) / scale;
    w.weights[j] = Eigen::Map<const Eigen::MatrixXcd>(row.data(), rows, cols).real();
    if (row.size() > 0) imag = std::max(imag, row.imag().cwiseAbs().maxCoeff());
    scale *= grid.lambda();
  }
  if (imag_residual != nullptr) *imag_residual = imag;
  return w;
}

DensityHistory mot_solve(const WeightSequence<Eigen::MatrixXd>& weights, const std::vector<Eigen::VectorXd>& rhs,
                         double rank_tol) {
  if (weights.size() == 0) throw DimensionMismatch("mot_solve: empty weight sequence");
  if (rhs.size() != weights.size()) throw DimensionMismatch("mot_solve: need one right-hand side per weight");
  const Eigen::MatrixXd& W0 = weights[0];
  for (const auto& g : rhs)
    if (g.size() != W0.rows()) throw DimensionMismatch("mot_solve: right-hand side length differs from rows");

  double scale = 0.0;
  for (const auto& W : weights.weights)
    if (W.size() > 0) scale = std::max(scale, W.cwiseAbs().maxCoeff());
  const double w0 = W0.size() > 0 ? W0.cwiseAbs().maxCoeff() : 0.0;
  if (!(w0 > 100.0 * std::sqrt(kMachineEps) * scale)) {
    throw MotInfeasible("MOT infeasible: the zeroth weight matrix is numerically zero; use the all-at-once solver");
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(W0);
  const auto& sv = svd.singularValues();
  if (W0.rows() < W0.cols() || !(sv(sv.size() - 1) >= rank_tol * sv(0))) {
    throw MotInfeasible("MOT infeasible: the zeroth weight matrix is rank deficient; use the all-at-once solver");
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(W0.rows(), W0.cols());
  cod.setThreshold(rank_tol);
  cod.compute(W0);

  DensityHistory out;
  out.phi.resize(rhs.size());
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    Eigen::VectorXd r = rhs[n];
    for (std::size_t l = 0; l < n; ++l) r.noalias() -= weights[n - l] * out.phi[l];
    out.phi[n] = cod.solve(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fields

FieldHistory evaluate_field(const DensityHistory& density, const FrequencyAssembler& observation,
                            const TimeGrid& grid, std::size_t workers) {
  if (density.size() != grid.size()) throw GridMismatch("evaluate_field: density history does not match the grid");
  const Eigen::Index cols = density.phi.front().size();
  const auto zetas = contour_points(grid);
  const std::size_t levels = grid.size();
  const std::size_t count = solve_count(levels, true);
  const Eigen::MatrixXcd phihat = to_frequency(density.phi, cols, grid.lambda());

  std::vector<Eigen::VectorXcd> uhat(count);
  auto apply = [&](std::size_t k) {
    const Eigen::MatrixXcd S = observation(k, zetas[k]);
    if (S.cols() != cols) throw DimensionMismatch("evaluate_field: observation matrix does not match the density");
    uhat[k] = S * phihat.row(static_cast<Eigen::Index>(k)).transpose();
  };
  apply(0);
  parallel_for(count - 1, workers, [&](std::size_t i) { apply(i + 1); });

  const Eigen::Index points = uhat[0].size();
  Eigen::MatrixXcd spectrum(static_cast<Eigen::Index>(levels), points);
  for (std::size_t k = 0; k < count; ++k) spectrum.row(static_cast<Eigen::Index>(k)) = uhat[k].transpose();
  fill_conjugates(spectrum, count);

  FieldHistory field;
  field.dt = grid.dt();
  field.values = to_time(std::move(spectrum), grid.lambda(), field.residual_imag);
  return field;
}

FieldHistory evaluate_field(const DensityHistory& density, const SpatialSystem& system,
                            const std::vector<Point>& points, Scheme scheme, Rule rule, const TimeGrid& grid,
                            bool shift_observation, std::size_t workers) {
  return evaluate_field(density, observation_assembler(system, points, scheme, rule, grid, shift_observation), grid,
                        workers);
}

std::size_t refinement_ratio(std::size_t coarse_steps, double coarse_dt, std::size_t fine_steps, double fine_dt) {
  if (coarse_steps == 0 || fine_steps % coarse_steps != 0) {
    throw GridMismatch("time grids are not nested: " + std::to_string(fine_steps) + " is not a multiple of " +
                       std::to_string(coarse_steps));
  }
  const std::size_t ratio = fine_steps / coarse_steps;
  if (std::abs(coarse_dt - static_cast<double>(ratio) * fine_dt) > 1e-12 * coarse_dt) {
    throw GridMismatch("time grids are not nested: final times differ");
  }
  return ratio;
}

double max_error(const FieldHistory& u_h, const FieldHistory& u_ref) {
  if (u_h.points() != u_ref.points()) throw DimensionMismatch("max_error: observation sets differ");
  const std::size_t ratio = refinement_ratio(u_h.steps(), u_h.dt, u_ref.steps(), u_ref.dt);
  double err = 0.0;
  for (Eigen::Index n = 0; n < u_h.values.rows(); ++n) {
    const Eigen::Index fine = n * static_cast<Eigen::Index>(ratio);
    err = std::max(err, (u_h.values.row(n) - u_ref.values.row(fine)).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace wavecq
