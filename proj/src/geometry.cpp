#include "wavecq/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wavecq/errors.hpp"
#include "wavecq/quadrature.hpp"

namespace wavecq {
namespace {

constexpr double kEllipseX = 0.4;  // semi-axis along x of f(unit circle)
constexpr double kEllipseY = 0.6;  // semi-axis along y

double ellipse_arclength(double u) {
  if (u <= 0.0) return 0.0;
  const auto& rule = gauss_legendre(20);
  const int panels = static_cast<int>(std::ceil(64.0 * u));
  const double h = u / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double theta = 2.0 * kPi * (h * (p + rule.nodes[q]));
      acc += rule.weights[q] * h * 2.0 * kPi *
             std::hypot(kEllipseX * std::cos(theta), kEllipseY * std::sin(theta));
    }
  }
  return acc;
}

}  // namespace

BoundaryPiece::BoundaryPiece(Arc arc) : kind_(Kind::Arc), arc_(arc) {
  if (!(arc.radius > 0.0)) throw std::invalid_argument("Arc: radius must be positive");
  length_ = arc.radius * std::abs(arc.theta1 - arc.theta0);
}

BoundaryPiece::BoundaryPiece(ConformalEllipse ellipse) : kind_(Kind::Ellipse), ellipse_(ellipse) {
  length_ = ellipse_arclength(1.0);
}

Point BoundaryPiece::point(double u) const {
  if (kind_ == Kind::Arc) {
    const double t = arc_.theta0 + u * (arc_.theta1 - arc_.theta0);
    return arc_.center + arc_.radius * Point(std::cos(t), std::sin(t));
  }
  const double t = 2.0 * kPi * u;
  return {ellipse_.offset - kEllipseX * std::sin(t), kEllipseY * std::cos(t)};
}

Point BoundaryPiece::derivative(double u) const {
  if (kind_ == Kind::Arc) {
    const double span = arc_.theta1 - arc_.theta0;
    const double t = arc_.theta0 + u * span;
    return arc_.radius * span * Point(-std::sin(t), std::cos(t));
  }
  const double t = 2.0 * kPi * u;
  return 2.0 * kPi * Point(-kEllipseX * std::cos(t), -kEllipseY * std::sin(t));
}

double BoundaryPiece::max_curvature() const {
  if (kind_ == Kind::Arc) return 1.0 / arc_.radius;
  return kEllipseY / (kEllipseX * kEllipseX);
}

double BoundaryPiece::arclength_to(double u) const {
  if (kind_ == Kind::Arc) return length_ * u;
  return ellipse_arclength(u);
}

double BoundaryPiece::parameter_at_fraction(double fraction) const {
  if (kind_ == Kind::Arc || fraction <= 0.0 || fraction >= 1.0) return std::clamp(fraction, 0.0, 1.0);
  const double target = fraction * length_;
  double u = fraction;
  for (int it = 0; it < 50; ++it) {
    const double du = (arclength_to(u) - target) / speed(u);
    u -= du;
    if (std::abs(du) < 1e-15) break;
  }
  return u;
}

ParametricBoundary::ParametricBoundary(std::vector<BoundaryPiece> pieces) : pieces_(std::move(pieces)) {}

double ParametricBoundary::length() const {
  double acc = 0.0;
  for (const auto& p : pieces_) acc += p.length();
  return acc;
}

bool ParametricBoundary::is_closed(double tol) const {
  if (pieces_.empty()) return false;
  Point loop_start = pieces_[0].point(0.0);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Point end = pieces_[i].point(1.0);
    const bool last = i + 1 == pieces_.size();
    if (!last && (end - pieces_[i + 1].point(0.0)).norm() <= tol) continue;
    // the current loop has to close here
    if ((end - loop_start).norm() > tol) return false;
    if (!last) loop_start = pieces_[i + 1].point(0.0);
  }
  return true;
}

double ParametricBoundary::distance_to(const Point& x) const {
  double best = std::numeric_limits<double>::infinity();
  constexpr int samples = 512;
  for (const auto& piece : pieces_) {
    int arg = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= samples; ++k) {
      const double d = (piece.point(static_cast<double>(k) / samples) - x).norm();
      if (d < dmin) {
        dmin = d;
        arg = k;
      }
    }
    // golden-section refinement on the bracketing interval
    double a = std::max(0.0, (arg - 1.0) / samples);
    double b = std::min(1.0, (arg + 1.0) / samples);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double u) { return (piece.point(u) - x).norm(); };
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 80; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f(d);
      }
    }
    best = std::min({best, dmin, fc, fd});
  }
  return best;
}

Point conformal_ellipse_map(cplx z, double offset) {
  if (z == cplx(0.0, 0.0)) throw DomainError("conformal_ellipse_map: z = 0");
  const cplx w = 0.5 * cplx(0.0, 1.0) * (z + 1.0 / (5.0 * z));
  return {w.real() + offset, w.imag()};
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::Disk: return "disk";
    case Shape::TwoEllipses: return "ellipses";
    case Shape::Semicircles: return "semicircles";
  }
  return "unknown";
}

Shape parse_shape(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "disk") return Shape::Disk;
  if (lower == "ellipses" || lower == "two_ellipses") return Shape::TwoEllipses;
  if (lower == "semicircles") return Shape::Semicircles;
  throw std::invalid_argument("unknown shape '" + std::string(name) + "'");
}

ParametricBoundary disk_boundary() { return ParametricBoundary({Arc{{0.0, 0.0}, 1.0, 0.0, 2.0 * kPi}}); }

ParametricBoundary two_ellipses_boundary() {
  return ParametricBoundary({ConformalEllipse{-2.0}, ConformalEllipse{2.0}});
}

ParametricBoundary semicircle_boundary() {
  const double h = 0.5 * kPi;
  return ParametricBoundary({
      Arc{{0.0, 0.0}, 1.0, -h, h},
      Arc{{0.0, 0.75}, 0.25, h, 3.0 * h},
      Arc{{0.0, 0.0}, 0.5, h, -h},
      Arc{{0.0, -0.75}, 0.25, h, 3.0 * h},
  });
}

ParametricBoundary boundary_for(Shape shape) {
  switch (shape) {
    case Shape::Disk: return disk_boundary();
    case Shape::TwoEllipses: return two_ellipses_boundary();
    case Shape::Semicircles: return semicircle_boundary();
  }
  throw std::logic_error("unhandled shape");
}

MfsLayout mfs_points(Shape shape, std::size_t M, std::size_t K, double R) {
  if (K < 1 || M < K) throw std::invalid_argument("mfs_points: need M >= K >= 1");
  if (!(R > 0.0) || R == 1.0) throw std::invalid_argument("mfs_points: R must be positive and != 1");
  MfsLayout layout;
  layout.R = R;
  auto ring = [](std::size_t n, double radius, std::size_t i) {
    return std::polar(radius, 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
  };
  switch (shape) {
    case Shape::Disk:
      for (std::size_t i = 0; i < M; ++i) {
        const cplx z = ring(M, 1.0, i);
        layout.collocation.emplace_back(z.real(), z.imag());
      }
      for (std::size_t j = 0; j < K; ++j) {
        const cplx z = ring(K, R, j);
        layout.sources.emplace_back(z.real(), z.imag());
      }
      layout.boundary = disk_boundary();
      break;
    case Shape::TwoEllipses: {
      if (M % 2 != 0 || K % 2 != 0) {
        throw std::invalid_argument("mfs_points: two ellipses need even M and K");
      }
      for (double offset : {-2.0, 2.0}) {
        for (std::size_t i = 0; i < M / 2; ++i) layout.collocation.push_back(conformal_ellipse_map(ring(M / 2, 1.0, i), offset));
        for (std::size_t j = 0; j < K / 2; ++j) layout.sources.push_back(conformal_ellipse_map(ring(K / 2, R, j), offset));
      }
      layout.boundary = two_ellipses_boundary();
      break;
    }
    case Shape::Semicircles:
      throw std::invalid_argument("mfs_points: no MFS layout for the semicircle domain");
  }
  return layout;
}

PanelMesh::PanelMesh(ParametricBoundary boundary, std::vector<Panel> panels)
    : boundary_(std::move(boundary)), panels_(std::move(panels)) {}

Point PanelMesh::point(std::size_t i, double t) const {
  const auto& p = panels_[i];
  return boundary_[p.piece].point(p.u0 + t * (p.u1 - p.u0));
}

double PanelMesh::jacobian(std::size_t i, double t) const {
  const auto& p = panels_[i];
  return boundary_[p.piece].speed(p.u0 + t * (p.u1 - p.u0)) * std::abs(p.u1 - p.u0);
}

double PanelMesh::curvature_bound(std::size_t i) const {
  return boundary_[panels_[i].piece].max_curvature();
}

bool PanelMesh::adjacent(std::size_t i, std::size_t j) const {
  if (i == j) return false;
  const auto& a = panels_[i];
  const auto& b = panels_[j];
  const double tol = 1e-10 * std::max(a.length, b.length);
  return (a.end - b.start).norm() <= tol || (a.start - b.end).norm() <= tol ||
         (a.start - b.start).norm() <= tol || (a.end - b.end).norm() <= tol;
}

std::vector<std::size_t> PanelMesh::counts_per_piece() const {
  std::vector<std::size_t> counts(boundary_.size(), 0);
  for (const auto& p : panels_) ++counts[p.piece];
  return counts;
}

std::vector<std::size_t> proportional_counts(const std::vector<double>& lengths, std::size_t M) {
  const std::size_t n = lengths.size();
  if (M < n) throw std::invalid_argument("panel_mesh: fewer panels than boundary pieces");
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<std::size_t> counts(n);
  std::vector<double> frac(n);
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = static_cast<double>(M) * lengths[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(share + 1e-9));
    frac[i] = share - static_cast<double>(counts[i]);
    used += counts[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-9; });
  for (std::size_t k = 0; used < M; ++k, ++used) ++counts[order[k % n]];
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] > 0) continue;
    const auto big = std::max_element(counts.begin(), counts.end()) - counts.begin();
    --counts[static_cast<std::size_t>(big)];
    counts[i] = 1;
  }
  return counts;
}

PanelMesh panel_mesh(const ParametricBoundary& boundary, std::size_t M) {
  std::vector<double> lengths;
  for (const auto& p : boundary.pieces()) lengths.push_back(p.length());
  const auto counts = proportional_counts(lengths, M);
  std::vector<Panel> panels;
  panels.reserve(M);
  for (std::size_t piece = 0; piece < boundary.size(); ++piece) {
    const auto& bp = boundary[piece];
    const double c = static_cast<double>(counts[piece]);
    double u_prev = 0.0;
    for (std::size_t k = 0; k < counts[piece]; ++k) {
      Panel p;
      p.piece = piece;
      p.u0 = u_prev;
      p.u1 = k + 1 == counts[piece] ? 1.0 : bp.parameter_at_fraction((static_cast<double>(k) + 1.0) / c);
      p.start = bp.point(p.u0);
      p.end = bp.point(p.u1);
      p.mid = bp.point(bp.parameter_at_fraction((static_cast<double>(k) + 0.5) / c));
      p.length = bp.arclength_to(p.u1) - bp.arclength_to(p.u0);
      u_prev = p.u1;
      panels.push_back(p);
    }
  }
  return PanelMesh(boundary, std::move(panels));
}

int shift_floor(double r, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("shift_floor: dt must be positive");
  if (!(r > 0.0)) return 0;
  // Correct the rounded quotient against the products actually used as shift times.
  int m = static_cast<int>(std::floor(r / dt));
  while (m > 0 && static_cast<double>(m) * dt > r) --m;
  while (static_cast<double>(m + 1) * dt <= r) ++m;
  return m;
}

ShiftData make_shift_data(Eigen::MatrixXd r, double dt) {
  ShiftData out;
  out.m.resize(r.rows(), r.cols());
  for (Eigen::Index j = 0; j < r.cols(); ++j)
    for (Eigen::Index i = 0; i < r.rows(); ++i) out.m(i, j) = shift_floor(r(i, j), dt);
  out.r = std::move(r);
  return out;
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

double segment_distance(const Point& a0, const Point& a1, const Point& b0, const Point& b1) {
  auto cross = [](const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); };
  const Point da = a1 - a0;
  const Point db = b1 - b0;
  const double denom = cross(da, db);
  if (denom != 0.0) {
    const double s = cross(b0 - a0, db) / denom;
    const double t = cross(b0 - a0, da) / denom;
    if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0) return 0.0;
  }
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

namespace {

// Each half of a panel deviates from its chord by at most kappa (L/2)^2 / 8.
double half_panel_sagitta(const PanelMesh& mesh, std::size_t i) {
  const double half = 0.5 * mesh[i].length;
  return mesh.curvature_bound(i) * half * half / 8.0;
}

}  // namespace

double panel_distance_bound(const PanelMesh& mesh, std::size_t i, std::size_t j) {
  if (i == j || mesh.adjacent(i, j)) return 0.0;
  const auto& a = mesh[i];
  const auto& b = mesh[j];
  const double d = std::min({segment_distance(a.start, a.mid, b.start, b.mid),
                             segment_distance(a.start, a.mid, b.mid, b.end),
                             segment_distance(a.mid, a.end, b.start, b.mid),
                             segment_distance(a.mid, a.end, b.mid, b.end)});
  return std::max(0.0, d - half_panel_sagitta(mesh, i) - half_panel_sagitta(mesh, j));
}

double point_panel_distance_bound(const PanelMesh& mesh, const Point& x, std::size_t j) {
  const auto& b = mesh[j];
  const double d = std::min(point_segment_distance(x, b.start, b.mid), point_segment_distance(x, b.mid, b.end));
  return std::max(0.0, d - half_panel_sagitta(mesh, j));
}

ShiftData shift_data_mfs(const MfsLayout& layout, double dt) {
  return observation_shifts(layout.collocation, layout, dt);
}

ShiftData shift_data_galerkin(const PanelMesh& mesh, double dt) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      r(i, j) = panel_distance_bound(mesh, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      r(j, i) = r(i, j);
    }
  }
  return make_shift_data(std::move(r), dt);
}

ShiftData observation_shifts(const std::vector<Point>& points, const MfsLayout& layout, double dt) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(layout.sources.size());
  Eigen::MatrixXd r(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      r(i, j) = (points[static_cast<std::size_t>(i)] - layout.sources[static_cast<std::size_t>(j)]).norm();
  return make_shift_data(std::move(r), dt);
}

ShiftData observation_shifts(const std::vector<Point>& points, const PanelMesh& mesh, double dt) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd r(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      r(i, j) = point_panel_distance_bound(mesh, points[static_cast<std::size_t>(i)], static_cast<std::size_t>(j));
  return make_shift_data(std::move(r), dt);
}

}  // namespace wavecq
