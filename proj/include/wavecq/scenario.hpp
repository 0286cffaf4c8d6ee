#pragma once

// The four experiment scenarios (disk, two ellipses, semicircles, interior
// disk), their configuration files, single runs with persisted output,
// convergence studies against a refined reference, and field snapshots.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wavecq/assembly.hpp"
#include "wavecq/config.hpp"
#include "wavecq/cq_core.hpp"
#include "wavecq/incident.hpp"
#include "wavecq/solver.hpp"

namespace wavecq {

enum class Geometry { Disk, TwoEllipses, Semicircles, DiskInterior };
enum class Problem { Exterior, Interior };
enum class Method { Mfs, Galerkin };
enum class SolverPath { AllAtOnce, Mot };

[[nodiscard]] std::string_view to_string(Geometry g);
[[nodiscard]] std::string_view to_string(Problem p);
[[nodiscard]] std::string_view to_string(Method m);
[[nodiscard]] std::string_view to_string(SolverPath p);
[[nodiscard]] Geometry parse_geometry(std::string_view name);
[[nodiscard]] Problem parse_problem(std::string_view name);
[[nodiscard]] Method parse_method(std::string_view name);
[[nodiscard]] SolverPath parse_solver_path(std::string_view name);

/// Regular grid of nx * ny points on [xmin, xmax] x [ymin, ymax].
struct SnapshotGrid {
  double xmin = -3.0;
  double xmax = 3.0;
  double ymin = -3.0;
  double ymax = 3.0;
  std::size_t nx = 61;
  std::size_t ny = 61;

  bool operator==(const SnapshotGrid&) const = default;
};

struct Scenario {
  std::string name = "disk";
  Geometry geometry = Geometry::Disk;
  Problem problem = Problem::Exterior;
  Method method = Method::Mfs;
  std::size_t M = 200;
  std::size_t K = 100;
  double R = 0.9;
  GalerkinOptions galerkin;
  Rule rule = Rule::BDF2;
  Scheme scheme = Scheme::Modified;
  std::size_t N = 256;
  double T = 10.0;
  SolverPath solver = SolverPath::AllAtOnce;
  /// Modified scheme only: false evaluates fields with standard observation
  /// weights.
  bool shift_observation = true;
  /// 0 selects default_worker_count().
  std::size_t workers = 0;
  IncidentSpec incident;
  std::vector<Point> observation;
  std::string output_dir = "out";
  std::vector<double> snapshot_times{2.5, 3.75, 5.0, 6.25, 7.5, 8.75};
  SnapshotGrid snapshot_grid;

  /// Throws ConfigError for inconsistent settings (sources on the wrong side
  /// of the boundary, MFS on the semicircles, N = 0, T <= 0, ...).
  void validate() const;
  bool operator==(const Scenario&) const;
};

/// 8 points on a circle of radius 2 (disk, semicircles), 4 (ellipses) or
/// 0.5 (interior disk) at angles 2 pi l / 8.
[[nodiscard]] std::vector<Point> default_observation_points(Geometry geometry);

/// Experiment defaults: MFS with R = 0.9 and the plane wave travelling in
/// direction (0,-1) for the disk and the ellipses, Galerkin with direction
/// (1,1)/sqrt(2) for the semicircles, MFS with R = 1.1 and the Gaussian pulse
/// for the interior disk.
[[nodiscard]] Scenario default_scenario(Geometry geometry);

/// Keys missing from the file take the defaults of its scenario.geometry;
/// unknown keys are rejected.
[[nodiscard]] Scenario scenario_from_config(const FlatConfig& cfg);
[[nodiscard]] FlatConfig scenario_to_config(const Scenario& sc);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

[[nodiscard]] ParametricBoundary scenario_boundary(Geometry geometry);
[[nodiscard]] std::unique_ptr<SpatialSystem> make_system(const Scenario& sc);
[[nodiscard]] TimeGrid scenario_grid(const Scenario& sc);
/// Dirichlet data -u^inc projected onto the discretisation.
[[nodiscard]] std::vector<Eigen::VectorXd> scenario_rhs(const Scenario& sc, const SpatialSystem& system,
                                                        const TimeGrid& grid);
/// True where the point lies outside the computational domain (inside the
/// scatterer for exterior problems, outside the disk for the interior one)
/// or within 1e-10 of the boundary.
[[nodiscard]] bool masked(const Scenario& sc, const Point& x);

struct ScenarioRun {
  Scenario scenario;
  TimeGrid grid;
  SolveResult solve;
  /// Scattered field at the observation points.
  FieldHistory field;
};

/// Solves and evaluates at the observation points without writing files.
[[nodiscard]] ScenarioRun solve_scenario(const Scenario& sc);

/// solve_scenario followed by writing scenario.cfg, report.txt, density.csv
/// and field.csv into sc.output_dir.
ScenarioRun run_scenario(const Scenario& sc);

enum class OnsetModel {
  /// dist(X, Gamma) + delay - 3 width
  Literal,
  /// min over boundary points y of |X - y| + delay + y.alpha - 3 width, the
  /// earliest time a signal from the window support can reach X
  TravelTime,
};

struct CausalityCheck {
  std::vector<double> onset;
  /// max |u(t_n, X_l)| over t_n < onset_l
  double max_before = 0.0;
  double max_abs = 0.0;
  [[nodiscard]] double ratio() const { return max_abs > 0.0 ? max_before / max_abs : 0.0; }
};

/// Plane-wave scenarios only.
[[nodiscard]] CausalityCheck check_causality(const ScenarioRun& run, OnsetModel model);

struct ReferenceSpec {
  std::size_t N = 1024;
  std::size_t M = 300;
  std::size_t K = 150;
  Rule rule = Rule::BDF2;
  Scheme scheme = Scheme::Modified;
};

/// N_ref = 4 * max(N list) and 1.5x the spatial degrees of freedom (rounded
/// up to even numbers), solved with modified BDF2.
[[nodiscard]] ReferenceSpec default_reference(const Scenario& sc, const std::vector<std::size_t>& Ns);
[[nodiscard]] Scenario reference_scenario(const Scenario& sc, const ReferenceSpec& ref);

struct ErrorRow {
  std::size_t N = 0;
  Rule rule = Rule::BDF2;
  Scheme scheme = Scheme::Standard;
  double omega = 0.0;
  double error = 0.0;
};

struct Combination {
  Rule rule;
  Scheme scheme;
};

/// All four (rule, scheme) pairs.
[[nodiscard]] std::vector<Combination> all_combinations();

/// max_error at the observation points for every N and combination against
/// one reference solve. Throws GridMismatch unless ref.N is a multiple of
/// every N.
[[nodiscard]] std::vector<ErrorRow> convergence_study(const Scenario& sc, const std::vector<std::size_t>& Ns,
                                                      const ReferenceSpec& ref,
                                                      const std::vector<Combination>& combos = all_combinations());

/// Header `N,rule,scheme,omega,error`.
[[nodiscard]] std::string error_table_csv(const std::vector<ErrorRow>& rows);

struct Snapshot {
  /// Requested time and the time level it was taken at.
  double time = 0.0;
  double level_time = 0.0;
  std::size_t level = 0;
  /// Row-major, x fastest; masked points hold NaN.
  std::vector<Point> points;
  std::vector<double> values;
  [[nodiscard]] std::size_t masked_count() const;
};

struct SnapshotSet {
  std::vector<Snapshot> snapshots;
  double max_total = 0.0;
  double max_incident = 0.0;
  /// max |u + u^inc| > 5 max |u^inc| on the grid
  [[nodiscard]] bool energy_warning() const { return max_total > 5.0 * max_incident; }
};

/// Total field u + u^inc on the grid at the time levels nearest to `times`.
/// Throws std::invalid_argument for times outside [0, T].
[[nodiscard]] SnapshotSet compute_snapshots(const Scenario& sc, const std::vector<double>& times,
                                            const SnapshotGrid& grid);

/// compute_snapshots followed by one `x,y,value` CSV per time in
/// sc.output_dir (masked points written as `nan`). Returns the file paths.
std::vector<std::filesystem::path> render_snapshots(const Scenario& sc, const std::vector<double>& times,
                                                    const SnapshotGrid& grid);

[[nodiscard]] std::string snapshot_csv(const Snapshot& snap);

}  // namespace wavecq
