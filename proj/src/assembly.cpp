#include "wavecq/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavecq/errors.hpp"
#include "wavecq/quadrature.hpp"

namespace wavecq {
namespace {

constexpr double kOnBoundaryTol = 1e-10;

void check_off_boundary(const ParametricBoundary& boundary, const std::vector<Point>& points) {
  for (std::size_t l = 0; l < points.size(); ++l) {
    if (boundary.distance_to(points[l]) <= kOnBoundaryTol) {
      throw DomainError("observation point " + std::to_string(l) + " lies on the boundary");
    }
  }
}

double shift_at(const Eigen::MatrixXd* shift_times, Eigen::Index i, Eigen::Index j) {
  return shift_times == nullptr ? 0.0 : (*shift_times)(i, j);
}

void check_shape(const Eigen::MatrixXd* shift_times, std::size_t rows, std::size_t cols) {
  if (shift_times != nullptr &&
      (shift_times->rows() != static_cast<Eigen::Index>(rows) ||
       shift_times->cols() != static_cast<Eigen::Index>(cols))) {
    throw DimensionMismatch("shift-time matrix does not match the system size");
  }
}

// Breakpoints 0 < sigma^L < ... < sigma < 1 of a geometric mesh toward 0.
std::vector<double> graded_breaks(double sigma, std::size_t levels) {
  std::vector<double> b{0.0};
  for (std::size_t k = levels; k >= 1; --k) b.push_back(std::pow(sigma, static_cast<double>(k)));
  b.push_back(1.0);
  return b;
}

// Applies `body(x, weight)` over a geometric mesh on [0,1] graded toward 0.
// Each graded interval is split further so that |s| * scale * width <= 2, and
// intervals on which the kernel has decayed by e^{-40} are dropped.
template <class Body>
void graded_rule(const GalerkinOptions& opt, cplx s, double scale, Body&& body) {
  const auto& rule = gauss_legendre(opt.q);
  const auto breaks = graded_breaks(opt.grading, opt.levels);
  const double abs_s = std::abs(s);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k];
    const double hi = breaks[k + 1];
    if (s.real() * scale * lo > 40.0) break;
    const auto pieces = static_cast<std::size_t>(std::clamp(std::ceil(abs_s * scale * (hi - lo) / 2.0), 1.0, 64.0));
    const double h = (hi - lo) / static_cast<double>(pieces);
    for (std::size_t p = 0; p < pieces; ++p) {
      const double a = lo + h * static_cast<double>(p);
      for (std::size_t n = 0; n < rule.size(); ++n) body(a + h * rule.nodes[n], h * rule.weights[n]);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MFS

MfsSystem::MfsSystem(MfsLayout layout, KernelFamily family) : layout_(std::move(layout)), family_(family) {}

Eigen::MatrixXcd MfsSystem::system_matrix(cplx s, const Eigen::MatrixXd* shift_times) const {
  check_shape(shift_times, rows(), cols());
  const auto M = static_cast<Eigen::Index>(rows());
  const auto K = static_cast<Eigen::Index>(cols());
  Eigen::MatrixXcd V(M, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    const Point& y = layout_.sources[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < M; ++i) {
      const double r = (layout_.collocation[static_cast<std::size_t>(i)] - y).norm();
      V(i, j) = shifted_kernel(family_, s, r, shift_at(shift_times, i, j));
    }
  }
  return V;
}

Eigen::MatrixXcd MfsSystem::observation_matrix(const std::vector<Point>& points, cplx s,
                                               const Eigen::MatrixXd* shift_times) const {
  check_off_boundary(layout_.boundary, points);
  check_shape(shift_times, points.size(), cols());
  const auto L = static_cast<Eigen::Index>(points.size());
  const auto K = static_cast<Eigen::Index>(cols());
  Eigen::MatrixXcd S(L, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    const Point& y = layout_.sources[static_cast<std::size_t>(j)];
    for (Eigen::Index l = 0; l < L; ++l) {
      const double r = (points[static_cast<std::size_t>(l)] - y).norm();
      S(l, j) = shifted_kernel(family_, s, r, shift_at(shift_times, l, j));
    }
  }
  return S;
}

ShiftData MfsSystem::system_shifts(double dt) const { return shift_data_mfs(layout_, dt); }

ShiftData MfsSystem::observation_shifts(const std::vector<Point>& points, double dt) const {
  return wavecq::observation_shifts(points, layout_, dt);
}

std::vector<Eigen::VectorXd> MfsSystem::project_rhs(const SpaceTimeFunction& data, const TimeGrid& grid) const {
  std::vector<Eigen::VectorXd> g(grid.size(), Eigen::VectorXd(rows()));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double t = grid.time(n);
    for (std::size_t i = 0; i < rows(); ++i) g[n](static_cast<Eigen::Index>(i)) = data(t, layout_.collocation[i]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Galerkin

GalerkinSystem::GalerkinSystem(PanelMesh mesh, KernelFamily family, GalerkinOptions options)
    : mesh_(std::move(mesh)), family_(family), options_(options) {
  if (options_.q == 0 || !(options_.grading > 0.0 && options_.grading < 1.0)) {
    throw std::invalid_argument("GalerkinSystem: invalid quadrature options");
  }
}

cplx GalerkinSystem::entry(std::size_t i, std::size_t j, cplx s, double shift_time) const {
  const double hi_len = mesh_[i].length;
  const double hj_len = mesh_[j].length;
  auto kernel_at = [&](double r) {
    if (!(r > 0.0)) throw QuadratureError(i, j, "quadrature node hit the kernel singularity");
    return shifted_kernel(family_, s, r, std::min(shift_time, r));
  };
  auto kernel = [&](const Point& x, const Point& y) { return kernel_at((x - y).norm()); };
  // Nodes a parameter distance `gap` apart on panel `p` around u: once the
  // subtraction of nearly equal points loses all digits, use the chord
  // |x'(u)| gap instead.
  auto close_distance = [&](std::size_t p, double u, double v, double gap) {
    const double r = (mesh_.point(p, u) - mesh_.point(p, v)).norm();
    const double linear = mesh_.jacobian(p, 0.5 * (u + v)) * gap;
    return r > 1e-6 * linear ? r : linear;
  };

  if (i == j) {
    if (family_ == KernelFamily::D3) throw QuadratureError(i, j, "3D kernel is not integrable on a self panel");
    // 2 int_0^1 dw int_0^{1-w} F(b + w, b) db, graded toward w = 0
    const auto& inner = gauss_legendre(options_.q);
    cplx acc = 0.0;
    graded_rule(options_, s, hi_len, [&](double w, double ww) {
      const double span = 1.0 - w;
      cplx row = 0.0;
      for (std::size_t n = 0; n < inner.size(); ++n) {
        const double b = span * inner.nodes[n];
        const double a = b + w;
        row += inner.weights[n] * kernel_at(close_distance(i, a, b, w)) * mesh_.jacobian(i, a) *
               mesh_.jacobian(i, b);
      }
      acc += ww * span * row;
    });
    return 2.0 * acc;
  }

  if (mesh_.adjacent(i, j)) {
    if (family_ == KernelFamily::D3) throw QuadratureError(i, j, "3D kernel is not integrable on adjacent panels");
    const auto& pi = mesh_[i];
    const auto& pj = mesh_[j];
    const double tol = 1e-10 * std::max(hi_len, hj_len);
    // local coordinates measured from the shared vertex
    bool i_at_start = true;
    bool j_at_start = true;
    if ((pi.end - pj.start).norm() <= tol) {
      i_at_start = false;
    } else if ((pi.start - pj.end).norm() <= tol) {
      j_at_start = false;
    } else if ((pi.end - pj.end).norm() <= tol) {
      i_at_start = false;
      j_at_start = false;
    }
    auto ti = [&](double a) { return i_at_start ? a : 1.0 - a; };
    auto tj = [&](double b) { return j_at_start ? b : 1.0 - b; };
    // Both points sit within a and b of the shared vertex; near it the
    // distance comes from the tangents there.
    const auto& pieces = mesh_.boundary();
    const Point vi = (i_at_start ? 1.0 : -1.0) * (pi.u1 - pi.u0) *
                     pieces[pi.piece].derivative(i_at_start ? pi.u0 : pi.u1);
    const Point vj = (j_at_start ? 1.0 : -1.0) * (pj.u1 - pj.u0) *
                     pieces[pj.piece].derivative(j_at_start ? pj.u0 : pj.u1);
    auto G = [&](double a, double b) {
      const double u = ti(a);
      const double v = tj(b);
      double r = (mesh_.point(i, u) - mesh_.point(j, v)).norm();
      const double linear = (a * vi - b * vj).norm();
      if (!(r > 1e-6 * linear)) r = linear;
      return kernel_at(r) * mesh_.jacobian(i, u) * mesh_.jacobian(j, v);
    };
    // Duffy: the two triangles a >= b and b > a, each collapsed to rho.
    const auto& inner = gauss_legendre(options_.q);
    cplx acc = 0.0;
    graded_rule(options_, s, std::min(hi_len, hj_len), [&](double rho, double wr) {
      cplx row = 0.0;
      for (std::size_t n = 0; n < inner.size(); ++n) {
        const double v = inner.nodes[n];
        row += inner.weights[n] * (G(rho, rho * v) + G(rho * v, rho));
      }
      acc += wr * rho * row;
    });
    return acc;
  }

  const double bound = panel_distance_bound(mesh_, i, j);
  const std::size_t q = bound < std::max(hi_len, hj_len) ? 2 * options_.q : options_.q;
  const auto& rule = gauss_legendre(q);
  std::vector<Point> yj(q);
  std::vector<double> jj(q);
  for (std::size_t n = 0; n < q; ++n) {
    yj[n] = mesh_.point(j, rule.nodes[n]);
    jj[n] = mesh_.jacobian(j, rule.nodes[n]) * rule.weights[n];
  }
  cplx acc = 0.0;
  for (std::size_t m = 0; m < q; ++m) {
    const Point x = mesh_.point(i, rule.nodes[m]);
    cplx row = 0.0;
    for (std::size_t n = 0; n < q; ++n) row += jj[n] * kernel(x, yj[n]);
    acc += rule.weights[m] * mesh_.jacobian(i, rule.nodes[m]) * row;
  }
  return acc;
}

Eigen::MatrixXcd GalerkinSystem::system_matrix(cplx s, const Eigen::MatrixXd* shift_times) const {
  check_shape(shift_times, rows(), cols());
  const auto M = static_cast<Eigen::Index>(mesh_.size());
  Eigen::MatrixXcd V(M, M);
  for (Eigen::Index j = 0; j < M; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      V(i, j) = entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j), s, shift_at(shift_times, i, j));
      V(j, i) = V(i, j);
    }
  }
  return V;
}

Eigen::MatrixXcd GalerkinSystem::observation_matrix(const std::vector<Point>& points, cplx s,
                                                    const Eigen::MatrixXd* shift_times) const {
  check_off_boundary(mesh_.boundary(), points);
  check_shape(shift_times, points.size(), cols());
  const auto L = static_cast<Eigen::Index>(points.size());
  const auto M = static_cast<Eigen::Index>(mesh_.size());
  Eigen::MatrixXcd S(L, M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const double len = mesh_[jj].length;
    for (Eigen::Index l = 0; l < L; ++l) {
      const Point& x = points[static_cast<std::size_t>(l)];
      const double t = shift_at(shift_times, l, j);
      // nearby points get more nodes and a split panel
      const double bound = point_panel_distance_bound(mesh_, x, jj);
      const std::size_t pieces = bound < len ? 8 : 1;
      const auto& rule = gauss_legendre(2 * options_.q);
      cplx acc = 0.0;
      for (std::size_t p = 0; p < pieces; ++p) {
        for (std::size_t n = 0; n < rule.size(); ++n) {
          const double u = (static_cast<double>(p) + rule.nodes[n]) / static_cast<double>(pieces);
          const double r = (mesh_.point(jj, u) - x).norm();
          acc += rule.weights[n] / static_cast<double>(pieces) * mesh_.jacobian(jj, u) *
                 shifted_kernel(family_, s, r, std::min(t, r));
        }
      }
      S(l, j) = acc;
    }
  }
  return S;
}

ShiftData GalerkinSystem::system_shifts(double dt) const { return shift_data_galerkin(mesh_, dt); }

ShiftData GalerkinSystem::observation_shifts(const std::vector<Point>& points, double dt) const {
  return wavecq::observation_shifts(points, mesh_, dt);
}

std::vector<Eigen::VectorXd> GalerkinSystem::project_rhs(const SpaceTimeFunction& data,
                                                         const TimeGrid& grid) const {
  const auto& rule = gauss_legendre(options_.q);
  const std::size_t M = mesh_.size();
  std::vector<Point> nodes(M * rule.size());
  std::vector<double> weights(M * rule.size());
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t n = 0; n < rule.size(); ++n) {
      nodes[i * rule.size() + n] = mesh_.point(i, rule.nodes[n]);
      weights[i * rule.size() + n] = rule.weights[n] * mesh_.jacobian(i, rule.nodes[n]);
    }
  }
  std::vector<Eigen::VectorXd> g(grid.size(), Eigen::VectorXd(M));
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double time = grid.time(t);
    for (std::size_t i = 0; i < M; ++i) {
      double acc = 0.0;
      for (std::size_t n = 0; n < rule.size(); ++n) acc += weights[i * rule.size() + n] * data(time, nodes[i * rule.size() + n]);
      g[t](static_cast<Eigen::Index>(i)) = acc;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Free functions

Eigen::MatrixXcd assemble_mfs(const MfsLayout& layout, cplx s, KernelFamily family) {
  return MfsSystem(layout, family).system_matrix(s);
}

Eigen::MatrixXcd assemble_galerkin(const PanelMesh& mesh, cplx s, KernelFamily family,
                                   const GalerkinOptions& options) {
  return GalerkinSystem(mesh, family, options).system_matrix(s);
}

namespace {

Eigen::MatrixXcd apply_zeta_powers(Eigen::MatrixXcd V, const Eigen::MatrixXi& m, cplx zeta) {
  for (Eigen::Index j = 0; j < V.cols(); ++j)
    for (Eigen::Index i = 0; i < V.rows(); ++i)
      if (m(i, j) != 0) V(i, j) *= std::pow(zeta, m(i, j));
  return V;
}

}  // namespace

Eigen::MatrixXcd assemble_modified(const SpatialSystem& system, const ShiftData& shifts, Rule rule,
                                   const TimeGrid& grid, cplx zeta) {
  const cplx s = delta_at(rule, zeta) / grid.dt();
  if (shifts.m.rows() != static_cast<Eigen::Index>(system.rows()) ||
      shifts.m.cols() != static_cast<Eigen::Index>(system.cols())) {
    throw DimensionMismatch("assemble_modified: shift matrix does not match the system size");
  }
  if ((shifts.m.array() == 0).all()) return system.system_matrix(s);
  const Eigen::MatrixXd times = shifts.m.cast<double>() * grid.dt();
  return apply_zeta_powers(system.system_matrix(s, &times), shifts.m, zeta);
}

Eigen::MatrixXcd assemble_observation(const SpatialSystem& system, const std::vector<Point>& points, cplx s) {
  return system.observation_matrix(points, s);
}

Eigen::MatrixXcd assemble_modified_observation(const SpatialSystem& system, const std::vector<Point>& points,
                                               const ShiftData& shifts, Rule rule, const TimeGrid& grid,
                                               cplx zeta) {
  const cplx s = delta_at(rule, zeta) / grid.dt();
  if (shifts.m.rows() != static_cast<Eigen::Index>(points.size()) ||
      shifts.m.cols() != static_cast<Eigen::Index>(system.cols())) {
    throw DimensionMismatch("assemble_modified_observation: shift matrix does not match");
  }
  if ((shifts.m.array() == 0).all()) return system.observation_matrix(points, s);
  const Eigen::MatrixXd times = shifts.m.cast<double>() * grid.dt();
  return apply_zeta_powers(system.observation_matrix(points, s, &times), shifts.m, zeta);
}

std::vector<Eigen::VectorXd> project_rhs(const SpatialSystem& system, const SpaceTimeFunction& data,
                                         const TimeGrid& grid) {
  return system.project_rhs(data, grid);
}

}  // namespace wavecq
