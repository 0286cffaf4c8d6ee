#pragma once

// Scatterer boundaries, MFS point layouts, Galerkin panel meshes and the
// distance/shift matrices that drive the modified scheme.

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wavecq/common.hpp"

namespace wavecq {

/// Circular arc c + rho e^{i theta}, theta running from theta0 to theta1
/// (either direction).
struct Arc {
  Point center{0.0, 0.0};
  double radius = 1.0;
  double theta0 = 0.0;
  double theta1 = 2.0 * kPi;
};

/// Image of the unit circle under f(z) = (i/2)(z + 1/(5z)), shifted by `offset`
/// along the x axis; theta runs over [0, 2 pi].
struct ConformalEllipse {
  double offset = 0.0;
};

/// One smooth piece of a boundary, parametrised by theta in [0, 1] after
/// normalisation (u = 0 start, u = 1 end).
class BoundaryPiece {
 public:
  BoundaryPiece(Arc arc);  // NOLINT(google-explicit-constructor)
  BoundaryPiece(ConformalEllipse ellipse);  // NOLINT(google-explicit-constructor)

  [[nodiscard]] Point point(double u) const;
  /// d/du of point(u).
  [[nodiscard]] Point derivative(double u) const;
  [[nodiscard]] double speed(double u) const { return derivative(u).norm(); }
  [[nodiscard]] double length() const { return length_; }
  /// Upper bound on the curvature along the piece.
  [[nodiscard]] double max_curvature() const;
  /// Parameter at which the arclength from u = 0 equals `fraction * length()`.
  [[nodiscard]] double parameter_at_fraction(double fraction) const;
  /// Arclength from 0 to u.
  [[nodiscard]] double arclength_to(double u) const;

 private:
  enum class Kind { Arc, Ellipse } kind_;
  Arc arc_{};
  ConformalEllipse ellipse_{};
  double length_ = 0.0;
};

class ParametricBoundary {
 public:
  ParametricBoundary() = default;
  explicit ParametricBoundary(std::vector<BoundaryPiece> pieces);

  [[nodiscard]] const std::vector<BoundaryPiece>& pieces() const noexcept { return pieces_; }
  [[nodiscard]] std::size_t size() const noexcept { return pieces_.size(); }
  [[nodiscard]] const BoundaryPiece& operator[](std::size_t i) const { return pieces_[i]; }
  [[nodiscard]] double length() const;
  /// Pieces join end to start, and every loop returns to its first point.
  [[nodiscard]] bool is_closed(double tol = 1e-12) const;
  /// Distance from x to the curve (sampled and refined; accurate to ~1e-12).
  [[nodiscard]] double distance_to(const Point& x) const;

 private:
  std::vector<BoundaryPiece> pieces_;
};

/// f(z) + offset with f(z) = (i/2)(z + 1/(5z)). Throws DomainError at z = 0.
[[nodiscard]] Point conformal_ellipse_map(cplx z, double offset);

enum class Shape { Disk, TwoEllipses, Semicircles };

[[nodiscard]] std::string_view to_string(Shape shape);
[[nodiscard]] Shape parse_shape(std::string_view name);

/// Unit circle, counter-clockwise.
[[nodiscard]] ParametricBoundary disk_boundary();
/// The ellipses f(e^{i theta}) - 2 and f(e^{i theta}) + 2.
[[nodiscard]] ParametricBoundary two_ellipses_boundary();
/// Gamma_1..Gamma_4: radii 1, 1/4, 1/2, 1/4 with centres 0, 3i/4, 0, -3i/4,
/// traversed as one closed curve from (0,-1).
[[nodiscard]] ParametricBoundary semicircle_boundary();
[[nodiscard]] ParametricBoundary boundary_for(Shape shape);

struct MfsLayout {
  std::vector<Point> collocation;
  std::vector<Point> sources;
  double R = 0.9;
  ParametricBoundary boundary;
};

/// Disk: x_i = e^{2 pi i i/M}, y_j = R e^{2 pi i j/K}. TwoEllipses: the same
/// construction with M/2 and K/2 points mapped onto each ellipse.
/// Throws std::invalid_argument unless M >= K >= 1, R > 0, R != 1, and (for
/// two ellipses) M and K are even. Semicircles are not an MFS shape.
[[nodiscard]] MfsLayout mfs_points(Shape shape, std::size_t M, std::size_t K, double R);

struct Panel {
  std::size_t piece = 0;
  double u0 = 0.0;
  double u1 = 1.0;
  Point start;
  Point end;
  Point mid;
  double length = 0.0;
};

class PanelMesh {
 public:
  PanelMesh(ParametricBoundary boundary, std::vector<Panel> panels);

  [[nodiscard]] const ParametricBoundary& boundary() const noexcept { return boundary_; }
  [[nodiscard]] const std::vector<Panel>& panels() const noexcept { return panels_; }
  [[nodiscard]] std::size_t size() const noexcept { return panels_.size(); }
  [[nodiscard]] const Panel& operator[](std::size_t i) const { return panels_[i]; }

  /// Point on panel i at local coordinate t in [0,1] and |dx/dt|.
  [[nodiscard]] Point point(std::size_t i, double t) const;
  [[nodiscard]] double jacobian(std::size_t i, double t) const;
  /// Curvature bound of the piece carrying panel i.
  [[nodiscard]] double curvature_bound(std::size_t i) const;
  /// True if i != j and the panels share an endpoint.
  [[nodiscard]] bool adjacent(std::size_t i, std::size_t j) const;
  /// Panel-count per boundary piece.
  [[nodiscard]] std::vector<std::size_t> counts_per_piece() const;

 private:
  ParametricBoundary boundary_;
  std::vector<Panel> panels_;
};

/// Largest-remainder split of M into shares proportional to `lengths`
/// (ties go to the lower index); every share is at least one.
[[nodiscard]] std::vector<std::size_t> proportional_counts(const std::vector<double>& lengths,
                                                           std::size_t M);

/// Arclength-uniform panels, counts per piece from proportional_counts.
/// Throws std::invalid_argument if M is smaller than the number of pieces.
[[nodiscard]] PanelMesh panel_mesh(const ParametricBoundary& boundary, std::size_t M);

struct ShiftData {
  Eigen::MatrixXd r;
  Eigen::MatrixXi m;
};

/// Largest m >= 0 with m * dt <= r in floating point (so t_m never exceeds r).
[[nodiscard]] int shift_floor(double r, double dt);
[[nodiscard]] ShiftData make_shift_data(Eigen::MatrixXd r, double dt);

/// Euclidean distance between two segments.
[[nodiscard]] double segment_distance(const Point& a0, const Point& a1, const Point& b0,
                                      const Point& b1);
[[nodiscard]] double point_segment_distance(const Point& x, const Point& a, const Point& b);

/// Certified lower bound on dist(panel i, panel j); zero for i == j and for
/// adjacent panels.
[[nodiscard]] double panel_distance_bound(const PanelMesh& mesh, std::size_t i, std::size_t j);
/// Certified lower bound on dist(x, panel j).
[[nodiscard]] double point_panel_distance_bound(const PanelMesh& mesh, const Point& x,
                                                std::size_t j);

[[nodiscard]] ShiftData shift_data_mfs(const MfsLayout& layout, double dt);
[[nodiscard]] ShiftData shift_data_galerkin(const PanelMesh& mesh, double dt);
/// Observation point to source distances.
[[nodiscard]] ShiftData observation_shifts(const std::vector<Point>& points,
                                           const MfsLayout& layout, double dt);
/// Observation point to panel distances (certified lower bounds).
[[nodiscard]] ShiftData observation_shifts(const std::vector<Point>& points, const PanelMesh& mesh,
                                           double dt);

}  // namespace wavecq
