#pragma once

// Frequency-domain single-layer matrices for the MFS and for piecewise
// constant Galerkin BEM, their entrywise shifted (modified) counterparts,
// right-hand-side projection and observation matrices.

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wavecq/common.hpp"
#include "wavecq/cq_core.hpp"
#include "wavecq/geometry.hpp"
#include "wavecq/special_kernels.hpp"

namespace wavecq {

/// Boundary data g(t, x).
using SpaceTimeFunction = std::function<double(double, const Point&)>;

struct GalerkinOptions {
  /// Gauss nodes per panel direction for regular pairs (doubled for pairs
  /// closer than a panel length).
  std::size_t q = 8;
  /// Geometric grading ratio and number of levels toward singular points.
  double grading = 0.5;
  std::size_t levels = 40;
};

/// A spatial discretisation of the single-layer operator. Every matrix is
/// assembled entrywise as e^{s T_ij} V(s)_ij for a matrix of shift times
/// T_ij <= r_ij (all zero when `shift_times` is null), so the modified scheme
/// and the standard one share one code path.
class SpatialSystem {
 public:
  virtual ~SpatialSystem() = default;

  [[nodiscard]] virtual std::size_t rows() const = 0;
  [[nodiscard]] virtual std::size_t cols() const = 0;
  [[nodiscard]] virtual KernelFamily family() const = 0;
  [[nodiscard]] virtual const ParametricBoundary& boundary() const = 0;

  [[nodiscard]] virtual Eigen::MatrixXcd system_matrix(cplx s,
                                                       const Eigen::MatrixXd* shift_times = nullptr) const = 0;
  /// Rows: observation points, columns: trial dofs. Throws DomainError for a
  /// point on the boundary.
  [[nodiscard]] virtual Eigen::MatrixXcd observation_matrix(
      const std::vector<Point>& points, cplx s, const Eigen::MatrixXd* shift_times = nullptr) const = 0;

  [[nodiscard]] virtual ShiftData system_shifts(double dt) const = 0;
  [[nodiscard]] virtual ShiftData observation_shifts(const std::vector<Point>& points, double dt) const = 0;

  /// g_n for n = 0..N: point samples (MFS) or panel integrals (Galerkin).
  [[nodiscard]] virtual std::vector<Eigen::VectorXd> project_rhs(const SpaceTimeFunction& data,
                                                                 const TimeGrid& grid) const = 0;
};

class MfsSystem final : public SpatialSystem {
 public:
  explicit MfsSystem(MfsLayout layout, KernelFamily family = KernelFamily::D2);

  [[nodiscard]] std::size_t rows() const override { return layout_.collocation.size(); }
  [[nodiscard]] std::size_t cols() const override { return layout_.sources.size(); }
  [[nodiscard]] KernelFamily family() const override { return family_; }
  [[nodiscard]] const ParametricBoundary& boundary() const override { return layout_.boundary; }
  [[nodiscard]] const MfsLayout& layout() const noexcept { return layout_; }

  [[nodiscard]] Eigen::MatrixXcd system_matrix(cplx s, const Eigen::MatrixXd* shift_times = nullptr) const override;
  [[nodiscard]] Eigen::MatrixXcd observation_matrix(const std::vector<Point>& points, cplx s,
                                                    const Eigen::MatrixXd* shift_times = nullptr) const override;
  [[nodiscard]] ShiftData system_shifts(double dt) const override;
  [[nodiscard]] ShiftData observation_shifts(const std::vector<Point>& points, double dt) const override;
  [[nodiscard]] std::vector<Eigen::VectorXd> project_rhs(const SpaceTimeFunction& data,
                                                         const TimeGrid& grid) const override;

 private:
  MfsLayout layout_;
  KernelFamily family_;
};

class GalerkinSystem final : public SpatialSystem {
 public:
  explicit GalerkinSystem(PanelMesh mesh, KernelFamily family = KernelFamily::D2,
                          GalerkinOptions options = {});

  [[nodiscard]] std::size_t rows() const override { return mesh_.size(); }
  [[nodiscard]] std::size_t cols() const override { return mesh_.size(); }
  [[nodiscard]] KernelFamily family() const override { return family_; }
  [[nodiscard]] const ParametricBoundary& boundary() const override { return mesh_.boundary(); }
  [[nodiscard]] const PanelMesh& mesh() const noexcept { return mesh_; }
  [[nodiscard]] const GalerkinOptions& options() const noexcept { return options_; }

  [[nodiscard]] Eigen::MatrixXcd system_matrix(cplx s, const Eigen::MatrixXd* shift_times = nullptr) const override;
  [[nodiscard]] Eigen::MatrixXcd observation_matrix(const std::vector<Point>& points, cplx s,
                                                    const Eigen::MatrixXd* shift_times = nullptr) const override;
  [[nodiscard]] ShiftData system_shifts(double dt) const override;
  [[nodiscard]] ShiftData observation_shifts(const std::vector<Point>& points, double dt) const override;
  [[nodiscard]] std::vector<Eigen::VectorXd> project_rhs(const SpaceTimeFunction& data,
                                                         const TimeGrid& grid) const override;

  /// One entry int_{Gamma_i} int_{Gamma_j} e^{s t} K(s,|x-y|); t must not
  /// exceed the certified panel distance.
  [[nodiscard]] cplx entry(std::size_t i, std::size_t j, cplx s, double shift_time = 0.0) const;

 private:
  PanelMesh mesh_;
  KernelFamily family_;
  GalerkinOptions options_;
};

/// (V_MFS(s))_ij = K(s, |x_i - y_j|).
[[nodiscard]] Eigen::MatrixXcd assemble_mfs(const MfsLayout& layout, cplx s,
                                            KernelFamily family = KernelFamily::D2);

/// (V_G(s))_ij = int_{Gamma_i} int_{Gamma_j} K(s,|x-y|) dGamma_y dGamma_x.
[[nodiscard]] Eigen::MatrixXcd assemble_galerkin(const PanelMesh& mesh, cplx s,
                                                 KernelFamily family = KernelFamily::D2,
                                                 const GalerkinOptions& options = {});

/// zeta^{m_ij} e^{m_ij delta(zeta)} V(delta(zeta)/dt)_ij, the exponential
/// being fused into the kernel evaluation.
[[nodiscard]] Eigen::MatrixXcd assemble_modified(const SpatialSystem& system, const ShiftData& shifts,
                                                 Rule rule, const TimeGrid& grid, cplx zeta);

/// Standard (shift-free) observation matrix S(s).
[[nodiscard]] Eigen::MatrixXcd assemble_observation(const SpatialSystem& system,
                                                    const std::vector<Point>& points, cplx s);

/// Modified observation matrix with observation shifts m_lj.
[[nodiscard]] Eigen::MatrixXcd assemble_modified_observation(const SpatialSystem& system,
                                                             const std::vector<Point>& points,
                                                             const ShiftData& shifts, Rule rule,
                                                             const TimeGrid& grid, cplx zeta);

[[nodiscard]] std::vector<Eigen::VectorXd> project_rhs(const SpatialSystem& system,
                                                       const SpaceTimeFunction& data,
                                                       const TimeGrid& grid);

}  // namespace wavecq
