#include "wavecq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "wavecq/errors.hpp"
#include "wavecq/geometry.hpp"
#include "wavecq/parallel.hpp"

namespace wavecq {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string format_point(const Point& p) { return format_double(p.x()) + ", " + format_double(p.y()); }

Point parse_point(std::string_view text, std::string_view what) {
  const auto v = parse_double_list(text, what);
  if (v.size() != 2) throw ConfigError(std::string(what) + ": expected 'x, y'");
  return {v[0], v[1]};
}

std::string format_points(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) out += (i ? "; " : "") + format_point(pts[i]);
  return out;
}

std::vector<Point> parse_points(std::string_view text) {
  std::vector<Point> out;
  for (const auto& item : split_list(text, ';')) out.push_back(parse_point(item, "observation.points"));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

// Boundary sampled densely as a closed polygon for inside tests.
std::vector<Point> boundary_polygon(const ParametricBoundary& boundary, int per_piece) {
  std::vector<Point> poly;
  for (const auto& piece : boundary.pieces())
    for (int k = 0; k < per_piece; ++k) poly.push_back(piece.point(static_cast<double>(k) / per_piece));
  return poly;
}

bool inside_polygon(const std::vector<Point>& poly, const Point& x) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) in = !in;
    }
  }
  return in;
}

const std::vector<Point>& cached_polygon(Geometry g) {
  static const std::vector<Point> ellipses = boundary_polygon(two_ellipses_boundary(), 4096);
  static const std::vector<Point> semicircles = boundary_polygon(semicircle_boundary(), 4096);
  return g == Geometry::TwoEllipses ? ellipses : semicircles;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string history_csv(const std::vector<Eigen::VectorXd>& rows, double dt, const std::string& prefix) {
  std::string out = "n,t";
  const Eigen::Index width = rows.empty() ? 0 : rows.front().size();
  for (Eigen::Index j = 0; j < width; ++j) out += "," + prefix + std::to_string(j);
  out += "\n";
  for (std::size_t n = 0; n < rows.size(); ++n) {
    out += std::to_string(n) + "," + format_double(static_cast<double>(n) * dt);
    for (Eigen::Index j = 0; j < width; ++j) out += "," + format_double(rows[n](j));
    out += "\n";
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Geometry g) {
  switch (g) {
    case Geometry::Disk: return "disk";
    case Geometry::TwoEllipses: return "two_ellipses";
    case Geometry::Semicircles: return "semicircles";
    case Geometry::DiskInterior: return "disk_interior";
  }
  return "unknown";
}

std::string_view to_string(Problem p) { return p == Problem::Exterior ? "exterior" : "interior"; }
std::string_view to_string(Method m) { return m == Method::Mfs ? "mfs" : "galerkin"; }
std::string_view to_string(SolverPath p) { return p == SolverPath::AllAtOnce ? "all_at_once" : "mot"; }

Geometry parse_geometry(std::string_view name) {
  const auto s = lowercase(name);
  for (Geometry g : {Geometry::Disk, Geometry::TwoEllipses, Geometry::Semicircles, Geometry::DiskInterior})
    if (s == to_string(g)) return g;
  throw ConfigError("unknown geometry '" + std::string(name) + "'");
}

Problem parse_problem(std::string_view name) {
  const auto s = lowercase(name);
  if (s == "exterior") return Problem::Exterior;
  if (s == "interior") return Problem::Interior;
  throw ConfigError("unknown problem '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  const auto s = lowercase(name);
  if (s == "mfs") return Method::Mfs;
  if (s == "galerkin") return Method::Galerkin;
  throw ConfigError("unknown spatial method '" + std::string(name) + "'");
}

SolverPath parse_solver_path(std::string_view name) {
  const auto s = lowercase(name);
  if (s == "all_at_once") return SolverPath::AllAtOnce;
  if (s == "mot") return SolverPath::Mot;
  throw ConfigError("unknown solver '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Scenario defaults and validation

std::vector<Point> default_observation_points(Geometry geometry) {
  double radius = 2.0;
  if (geometry == Geometry::TwoEllipses) radius = 4.0;
  if (geometry == Geometry::DiskInterior) radius = 0.5;
  std::vector<Point> pts;
  for (int l = 0; l < 8; ++l) {
    const double theta = 2.0 * kPi * l / 8.0;
    pts.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
  }
  return pts;
}

Scenario default_scenario(Geometry geometry) {
  Scenario sc;
  sc.name = std::string(to_string(geometry));
  sc.geometry = geometry;
  sc.observation = default_observation_points(geometry);
  sc.output_dir = "out/" + sc.name;
  switch (geometry) {
    case Geometry::Disk:
      break;
    case Geometry::TwoEllipses:
      sc.snapshot_grid = {-4.0, 4.0, -3.0, 3.0, 81, 61};
      break;
    case Geometry::Semicircles:
      sc.method = Method::Galerkin;
      sc.M = 200;
      sc.K = 200;
      sc.incident.plane.alpha = Point(1.0, 1.0) / std::sqrt(2.0);
      break;
    case Geometry::DiskInterior:
      sc.problem = Problem::Interior;
      sc.R = 1.1;
      sc.incident.kind = IncidentKind::Gaussian;
      sc.snapshot_grid = {-1.0, 1.0, -1.0, 1.0, 61, 61};
      break;
  }
  return sc;
}

void Scenario::validate() const {
  const bool interior_geometry = geometry == Geometry::DiskInterior;
  if (interior_geometry != (problem == Problem::Interior)) {
    throw ConfigError("scenario: disk_interior is the only interior geometry");
  }
  if (method == Method::Mfs) {
    if (geometry == Geometry::Semicircles) throw ConfigError("scenario: MFS is not available for the semicircles");
    if (K < 1 || M < K) throw ConfigError("scenario: MFS needs M >= K >= 1");
    if (problem == Problem::Exterior && !(R > 0.0 && R < 1.0)) {
      throw ConfigError("scenario: exterior MFS needs 0 < R < 1");
    }
    if (problem == Problem::Interior && !(R > 1.0)) throw ConfigError("scenario: interior MFS needs R > 1");
    if (geometry == Geometry::TwoEllipses && (M % 2 != 0 || K % 2 != 0)) {
      throw ConfigError("scenario: two ellipses need even M and K");
    }
  } else if (M < 4) {
    throw ConfigError("scenario: Galerkin needs at least 4 panels");
  }
  if (N < 1) throw ConfigError("scenario: N must be positive");
  if (!(T > 0.0)) throw ConfigError("scenario: T must be positive");
  if (galerkin.q < 1 || galerkin.levels < 1 || !(galerkin.grading > 0.0 && galerkin.grading < 1.0)) {
    throw ConfigError("scenario: invalid Galerkin quadrature settings");
  }
  incident.validate();
  if (observation.empty()) throw ConfigError("scenario: at least one observation point is needed");
  if (snapshot_grid.nx < 1 || snapshot_grid.ny < 1 || !(snapshot_grid.xmax >= snapshot_grid.xmin) ||
      !(snapshot_grid.ymax >= snapshot_grid.ymin)) {
    throw ConfigError("scenario: invalid snapshot grid");
  }
}

bool Scenario::operator==(const Scenario& o) const {
  return name == o.name && geometry == o.geometry && problem == o.problem && method == o.method && M == o.M &&
         K == o.K && R == o.R && galerkin.q == o.galerkin.q && galerkin.grading == o.galerkin.grading &&
         galerkin.levels == o.galerkin.levels && rule == o.rule && scheme == o.scheme && N == o.N && T == o.T &&
         solver == o.solver && shift_observation == o.shift_observation && workers == o.workers &&
         incident == o.incident && observation == o.observation &&
         output_dir == o.output_dir && snapshot_times == o.snapshot_times && snapshot_grid == o.snapshot_grid;
}

// ---------------------------------------------------------------------------
// Configuration

FlatConfig scenario_to_config(const Scenario& sc) {
  FlatConfig c;
  c.set("scenario.name", sc.name);
  c.set("scenario.geometry", std::string(to_string(sc.geometry)));
  c.set("scenario.problem", std::string(to_string(sc.problem)));
  c.set("spatial.method", std::string(to_string(sc.method)));
  c.set("spatial.M", std::to_string(sc.M));
  c.set("spatial.K", std::to_string(sc.K));
  c.set("spatial.R", format_double(sc.R));
  c.set("spatial.quadrature_order", std::to_string(sc.galerkin.q));
  c.set("spatial.grading", format_double(sc.galerkin.grading));
  c.set("spatial.levels", std::to_string(sc.galerkin.levels));
  c.set("time.rule", std::string(to_string(sc.rule)));
  c.set("time.scheme", std::string(to_string(sc.scheme)));
  c.set("time.N", std::to_string(sc.N));
  c.set("time.T", format_double(sc.T));
  c.set("time.solver", std::string(to_string(sc.solver)));
  c.set("time.shift_observation", sc.shift_observation ? "true" : "false");
  c.set("time.workers", std::to_string(sc.workers));
  c.set("incident.kind", sc.incident.kind == IncidentKind::PlaneWave ? "plane_wave" : "gaussian");
  c.set("incident.omega", format_double(sc.incident.plane.omega));
  c.set("incident.alpha", format_point(sc.incident.plane.alpha));
  c.set("incident.delay", format_double(sc.incident.plane.delay));
  c.set("incident.width", format_double(sc.incident.plane.width));
  c.set("incident.a", format_double(sc.incident.gaussian.a));
  c.set("incident.x0", format_point(sc.incident.gaussian.x0));
  c.set("observation.points", format_points(sc.observation));
  c.set("output.dir", sc.output_dir);
  c.set("snapshots.times", format_list(sc.snapshot_times));
  c.set("snapshots.xmin", format_double(sc.snapshot_grid.xmin));
  c.set("snapshots.xmax", format_double(sc.snapshot_grid.xmax));
  c.set("snapshots.ymin", format_double(sc.snapshot_grid.ymin));
  c.set("snapshots.ymax", format_double(sc.snapshot_grid.ymax));
  c.set("snapshots.nx", std::to_string(sc.snapshot_grid.nx));
  c.set("snapshots.ny", std::to_string(sc.snapshot_grid.ny));
  return c;
}

Scenario scenario_from_config(const FlatConfig& cfg) {
  const auto geometry_text = cfg.find("scenario.geometry");
  if (!geometry_text) throw ConfigError("config: scenario.geometry is required");
  Scenario sc = default_scenario(parse_geometry(*geometry_text));

  const std::set<std::string> known = [] {
    std::set<std::string> k;
    for (const auto& key : scenario_to_config(Scenario{}).keys()) k.insert(key);
    return k;
  }();
  for (const auto& key : cfg.keys())
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");

  auto get = [&](const char* key) { return cfg.find(key); };
  if (auto v = get("scenario.name")) sc.name = *v;
  if (auto v = get("scenario.problem")) sc.problem = parse_problem(*v);
  if (auto v = get("spatial.method")) sc.method = parse_method(*v);
  if (auto v = get("spatial.M")) sc.M = parse_size(*v, "spatial.M");
  if (auto v = get("spatial.K")) sc.K = parse_size(*v, "spatial.K");
  if (auto v = get("spatial.R")) sc.R = parse_double(*v, "spatial.R");
  if (auto v = get("spatial.quadrature_order")) sc.galerkin.q = parse_size(*v, "spatial.quadrature_order");
  if (auto v = get("spatial.grading")) sc.galerkin.grading = parse_double(*v, "spatial.grading");
  if (auto v = get("spatial.levels")) sc.galerkin.levels = parse_size(*v, "spatial.levels");
  try {
    if (auto v = get("time.rule")) sc.rule = parse_rule(*v);
    if (auto v = get("time.scheme")) sc.scheme = parse_scheme(*v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (auto v = get("time.N")) sc.N = parse_size(*v, "time.N");
  if (auto v = get("time.T")) sc.T = parse_double(*v, "time.T");
  if (auto v = get("time.solver")) sc.solver = parse_solver_path(*v);
  if (auto v = get("time.shift_observation")) sc.shift_observation = parse_bool(*v, "time.shift_observation");
  if (auto v = get("time.workers")) sc.workers = parse_size(*v, "time.workers");
  if (auto v = get("incident.kind")) {
    const auto kind = lowercase(*v);
    if (kind == "plane_wave") {
      sc.incident.kind = IncidentKind::PlaneWave;
    } else if (kind == "gaussian") {
      sc.incident.kind = IncidentKind::Gaussian;
    } else {
      throw ConfigError("config: unknown incident.kind '" + *v + "'");
    }
  }
  if (auto v = get("incident.omega")) sc.incident.plane.omega = parse_double(*v, "incident.omega");
  if (auto v = get("incident.alpha")) sc.incident.plane.alpha = parse_point(*v, "incident.alpha");
  if (auto v = get("incident.delay")) sc.incident.plane.delay = parse_double(*v, "incident.delay");
  if (auto v = get("incident.width")) sc.incident.plane.width = parse_double(*v, "incident.width");
  if (auto v = get("incident.a")) sc.incident.gaussian.a = parse_double(*v, "incident.a");
  if (auto v = get("incident.x0")) sc.incident.gaussian.x0 = parse_point(*v, "incident.x0");
  if (auto v = get("observation.points")) sc.observation = parse_points(*v);
  if (auto v = get("output.dir")) sc.output_dir = *v;
  if (auto v = get("snapshots.times")) sc.snapshot_times = parse_double_list(*v, "snapshots.times");
  if (auto v = get("snapshots.xmin")) sc.snapshot_grid.xmin = parse_double(*v, "snapshots.xmin");
  if (auto v = get("snapshots.xmax")) sc.snapshot_grid.xmax = parse_double(*v, "snapshots.xmax");
  if (auto v = get("snapshots.ymin")) sc.snapshot_grid.ymin = parse_double(*v, "snapshots.ymin");
  if (auto v = get("snapshots.ymax")) sc.snapshot_grid.ymax = parse_double(*v, "snapshots.ymax");
  if (auto v = get("snapshots.nx")) sc.snapshot_grid.nx = parse_size(*v, "snapshots.nx");
  if (auto v = get("snapshots.ny")) sc.snapshot_grid.ny = parse_size(*v, "snapshots.ny");
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_config(FlatConfig::load(path)); }

// ---------------------------------------------------------------------------
// Discretisation

ParametricBoundary scenario_boundary(Geometry geometry) {
  switch (geometry) {
    case Geometry::TwoEllipses: return two_ellipses_boundary();
    case Geometry::Semicircles: return semicircle_boundary();
    default: return disk_boundary();
  }
}

std::unique_ptr<SpatialSystem> make_system(const Scenario& sc) {
  sc.validate();
  if (sc.method == Method::Mfs) {
    const Shape shape = sc.geometry == Geometry::TwoEllipses ? Shape::TwoEllipses : Shape::Disk;
    return std::make_unique<MfsSystem>(mfs_points(shape, sc.M, sc.K, sc.R));
  }
  return std::make_unique<GalerkinSystem>(panel_mesh(scenario_boundary(sc.geometry), sc.M), KernelFamily::D2,
                                          sc.galerkin);
}

TimeGrid scenario_grid(const Scenario& sc) { return TimeGrid::with_final_time(sc.N, sc.T); }

std::vector<Eigen::VectorXd> scenario_rhs(const Scenario& sc, const SpatialSystem& system, const TimeGrid& grid) {
  if (sc.incident.kind == IncidentKind::PlaneWave) {
    const WindowedPlaneWave plane = sc.incident.plane;
    return project_rhs(system, [plane](double t, const Point& x) { return dirichlet_data(t, x, plane); }, grid);
  }
  const auto* mfs = dynamic_cast<const MfsSystem*>(&system);
  if (mfs == nullptr) {
    const GaussianPulse pulse = sc.incident.gaussian;
    return project_rhs(system, [pulse](double t, const Point& x) { return -gaussian_incident(x, t, pulse); }, grid);
  }
  // collocation data: one Bessel table per point for all time levels
  const auto& pts = mfs->layout().collocation;
  std::vector<double> times(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) times[n] = grid.time(n);
  std::vector<Eigen::VectorXd> rhs(grid.size(), Eigen::VectorXd(static_cast<Eigen::Index>(pts.size())));
  parallel_for(pts.size(), sc.workers, [&](std::size_t i) {
    const auto u = gaussian_incident_history(pts[i], times, sc.incident.gaussian);
    for (std::size_t n = 0; n < grid.size(); ++n) rhs[n](static_cast<Eigen::Index>(i)) = -u[n];
  });
  return rhs;
}

bool masked(const Scenario& sc, const Point& x) {
  constexpr double on_boundary = 1e-10;
  switch (sc.geometry) {
    case Geometry::Disk: return x.norm() < 1.0 + on_boundary;
    case Geometry::DiskInterior: return !(x.norm() < 1.0 - on_boundary);
    default: {
      static const ParametricBoundary ellipses = two_ellipses_boundary();
      static const ParametricBoundary semicircles = semicircle_boundary();
      const auto& boundary = sc.geometry == Geometry::TwoEllipses ? ellipses : semicircles;
      return inside_polygon(cached_polygon(sc.geometry), x) || boundary.distance_to(x) <= on_boundary;
    }
  }
}

// ---------------------------------------------------------------------------
// Runs

ScenarioRun solve_scenario(const Scenario& sc) {
  sc.validate();
  const auto system = make_system(sc);
  const TimeGrid grid = scenario_grid(sc);
  const auto rhs = scenario_rhs(sc, *system, grid);
  ScenarioRun run{sc, grid, {}, {}};
  if (sc.solver == SolverPath::AllAtOnce) {
    SolveOptions opt;
    opt.workers = sc.workers;
    run.solve = all_at_once_solve(*system, sc.scheme, sc.rule, rhs, grid, opt);
  } else {
    const auto start = std::chrono::steady_clock::now();
    double imag = 0.0;
    const auto weights =
        matrix_weights_fft(system_assembler(*system, sc.scheme, sc.rule, grid), grid, sc.workers, &imag);
    run.solve.density = mot_solve(weights, rhs);
    run.solve.density.residual_imag = imag;
    auto& rep = run.solve.report;
    rep.scheme = std::string(to_string(sc.scheme));
    rep.rule = std::string(to_string(sc.rule));
    rep.steps = grid.steps();
    rep.rows = system->rows();
    rep.cols = system->cols();
    rep.half_solve = true;
    rep.workers = sc.workers == 0 ? default_worker_count() : sc.workers;
    rep.residual_imag = imag;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  run.field = evaluate_field(run.solve.density, *system, sc.observation, sc.scheme, sc.rule, grid, sc.shift_observation, sc.workers);
  return run;
}

ScenarioRun run_scenario(const Scenario& sc) {
  ScenarioRun run = solve_scenario(sc);
  const std::filesystem::path dir(sc.output_dir);
  std::filesystem::create_directories(dir);
  scenario_to_config(sc).save(dir / "scenario.cfg");

  std::string report = "# " + sc.name + "\nsolver = " + std::string(to_string(sc.solver)) + "\n";
  report += run.solve.report.to_text();
  report += "field_residual_imag = " + format_double(run.field.residual_imag) + "\n";
  if (sc.incident.kind == IncidentKind::PlaneWave && sc.problem == Problem::Exterior) {
    const auto check = check_causality(run, OnsetModel::TravelTime);
    report += "causality_ratio = " + format_double(check.ratio()) + "\n";
  }
  write_text(dir / "report.txt", report);
  write_text(dir / "density.csv", history_csv(run.solve.density.phi, run.grid.dt(), "phi"));
  std::vector<Eigen::VectorXd> rows(run.field.values.rows());
  for (Eigen::Index n = 0; n < run.field.values.rows(); ++n) rows[static_cast<std::size_t>(n)] = run.field.values.row(n).transpose();
  write_text(dir / "field.csv", history_csv(rows, run.grid.dt(), "u"));
  return run;
}

CausalityCheck check_causality(const ScenarioRun& run, OnsetModel model) {
  const Scenario& sc = run.scenario;
  if (sc.incident.kind != IncidentKind::PlaneWave) {
    throw std::invalid_argument("check_causality: needs plane-wave data");
  }
  const auto& pw = sc.incident.plane;
  const ParametricBoundary boundary = scenario_boundary(sc.geometry);
  const auto samples = boundary_polygon(boundary, 4096);
  CausalityCheck out;
  for (const auto& X : sc.observation) {
    double onset = 0.0;
    if (model == OnsetModel::Literal) {
      onset = boundary.distance_to(X) + pw.delay - 3.0 * pw.width;
    } else {
      onset = std::numeric_limits<double>::infinity();
      for (const auto& y : samples) onset = std::min(onset, (X - y).norm() + pw.delay + y.dot(pw.alpha));
      onset -= 3.0 * pw.width;
    }
    out.onset.push_back(onset);
  }
  const auto& u = run.field.values;
  out.max_abs = u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index n = 0; n < u.rows(); ++n) {
    const double t = run.grid.time(static_cast<std::size_t>(n));
    for (Eigen::Index l = 0; l < u.cols(); ++l)
      if (t < out.onset[static_cast<std::size_t>(l)]) out.max_before = std::max(out.max_before, std::abs(u(n, l)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence studies

ReferenceSpec default_reference(const Scenario& sc, const std::vector<std::size_t>& Ns) {
  ReferenceSpec ref;
  ref.N = 4 * (Ns.empty() ? sc.N : *std::max_element(Ns.begin(), Ns.end()));
  auto scaled = [](std::size_t v) { return (3 * v / 2 + 1) / 2 * 2; };
  ref.M = scaled(sc.M);
  ref.K = sc.method == Method::Galerkin ? ref.M : scaled(sc.K);
  return ref;
}

Scenario reference_scenario(const Scenario& sc, const ReferenceSpec& ref) {
  Scenario r = sc;
  r.N = ref.N;
  r.M = ref.M;
  r.K = ref.K;
  r.rule = ref.rule;
  r.scheme = ref.scheme;
  r.solver = SolverPath::AllAtOnce;
  return r;
}

std::vector<Combination> all_combinations() {
  return {{Rule::BDF2, Scheme::Standard},
          {Rule::BDF2, Scheme::Modified},
          {Rule::Trapezoidal, Scheme::Standard},
          {Rule::Trapezoidal, Scheme::Modified}};
}

std::vector<ErrorRow> convergence_study(const Scenario& sc, const std::vector<std::size_t>& Ns,
                                        const ReferenceSpec& ref, const std::vector<Combination>& combos) {
  for (std::size_t N : Ns) {
    if (N == 0 || ref.N % N != 0) {
      throw GridMismatch("convergence_study: reference N = " + std::to_string(ref.N) + " is not a multiple of " +
                         std::to_string(N));
    }
  }
  const ScenarioRun reference = solve_scenario(reference_scenario(sc, ref));
  std::vector<ErrorRow> rows;
  for (std::size_t N : Ns) {
    for (const auto& c : combos) {
      Scenario s = sc;
      s.N = N;
      s.rule = c.rule;
      s.scheme = c.scheme;
      const ScenarioRun run = solve_scenario(s);
      rows.push_back({N, c.rule, c.scheme, sc.incident.plane.omega, max_error(run.field, reference.field)});
    }
  }
  return rows;
}

std::string error_table_csv(const std::vector<ErrorRow>& rows) {
  std::string out = "N,rule,scheme,omega,error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.N) + "," + std::string(to_string(r.rule)) + "," + std::string(to_string(r.scheme)) +
           "," + format_double(r.omega) + "," + format_double(r.error) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

std::size_t Snapshot::masked_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }));
}

SnapshotSet compute_snapshots(const Scenario& sc, const std::vector<double>& times, const SnapshotGrid& g) {
  const TimeGrid grid = scenario_grid(sc);
  for (double t : times)
    if (!(t >= 0.0 && t <= sc.T * (1.0 + 1e-12))) throw std::invalid_argument("snapshot time outside [0, T]");

  std::vector<Point> all;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double y = g.ny == 1 ? g.ymin : g.ymin + (g.ymax - g.ymin) * static_cast<double>(j) / (g.ny - 1);
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double x = g.nx == 1 ? g.xmin : g.xmin + (g.xmax - g.xmin) * static_cast<double>(i) / (g.nx - 1);
      all.emplace_back(x, y);
    }
  }
  std::vector<std::size_t> active;
  std::vector<Point> active_pts;
  for (std::size_t p = 0; p < all.size(); ++p) {
    if (!masked(sc, all[p])) {
      active.push_back(p);
      active_pts.push_back(all[p]);
    }
  }

  std::vector<std::size_t> levels;
  std::vector<double> level_times;
  for (double t : times) {
    const auto n = std::min(grid.steps(), static_cast<std::size_t>(std::llround(t / grid.dt())));
    levels.push_back(n);
    level_times.push_back(grid.time(n));
  }

  FieldHistory field;
  if (!active_pts.empty()) {
    const auto system = make_system(sc);
    const auto rhs = scenario_rhs(sc, *system, grid);
    SolveOptions opt;
    opt.workers = sc.workers;
    DensityHistory density;
    if (sc.solver == SolverPath::AllAtOnce) {
      density = all_at_once_solve(*system, sc.scheme, sc.rule, rhs, grid, opt).density;
    } else {
      density = mot_solve(matrix_weights_fft(system_assembler(*system, sc.scheme, sc.rule, grid), grid, sc.workers), rhs);
    }
    field = evaluate_field(density, *system, active_pts, sc.scheme, sc.rule, grid, sc.shift_observation, sc.workers);
  }

  // incident field at the active points and chosen levels
  Eigen::MatrixXd incident(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(active_pts.size()));
  parallel_for(active_pts.size(), sc.workers, [&](std::size_t p) {
    std::vector<double> vals;
    if (sc.incident.kind == IncidentKind::Gaussian) {
      vals = gaussian_incident_history(active_pts[p], level_times, sc.incident.gaussian);
    } else {
      for (double t : level_times) vals.push_back(plane_wave(t, active_pts[p], sc.incident.plane));
    }
    for (std::size_t m = 0; m < vals.size(); ++m) incident(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p)) = vals[m];
  });

  SnapshotSet set;
  for (std::size_t m = 0; m < times.size(); ++m) {
    Snapshot snap;
    snap.time = times[m];
    snap.level = levels[m];
    snap.level_time = level_times[m];
    snap.points = all;
    snap.values.assign(all.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t p = 0; p < active.size(); ++p) {
      const double inc = incident(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
      const double total = field.values(static_cast<Eigen::Index>(levels[m]), static_cast<Eigen::Index>(p)) + inc;
      snap.values[active[p]] = total;
      set.max_total = std::max(set.max_total, std::abs(total));
      set.max_incident = std::max(set.max_incident, std::abs(inc));
    }
    set.snapshots.push_back(std::move(snap));
  }
  return set;
}

std::string snapshot_csv(const Snapshot& snap) {
  std::string out = "x,y,value\n";
  for (std::size_t p = 0; p < snap.points.size(); ++p) {
    out += format_double(snap.points[p].x()) + "," + format_double(snap.points[p].y()) + ",";
    out += std::isnan(snap.values[p]) ? std::string("nan") : format_double(snap.values[p]);
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> render_snapshots(const Scenario& sc, const std::vector<double>& times,
                                                    const SnapshotGrid& grid) {
  const SnapshotSet set = compute_snapshots(sc, times, grid);
  const std::filesystem::path dir(sc.output_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (const auto& snap : set.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_t%.4f.csv", snap.time);
    files.push_back(dir / name);
    write_text(files.back(), snapshot_csv(snap));
  }
  std::string summary = "max_total = " + format_double(set.max_total) + "\nmax_incident = " +
                        format_double(set.max_incident) + "\nenergy_warning = " +
                        (set.energy_warning() ? "true" : "false") + "\n";
  write_text(dir / "snapshots.txt", summary);
  return files;
}

}  // namespace wavecq
