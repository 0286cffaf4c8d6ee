// Command-line driver: solve a scenario, run a convergence study, or write
// field snapshots. Command-line values override the configuration file.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wavecq/config.hpp"
#include "wavecq/errors.hpp"
#include "wavecq/parallel.hpp"
#include "wavecq/scenario.hpp"

using namespace wavecq;

namespace {

struct Overrides {
  std::string config;
  std::string rule;
  std::string scheme;
  std::optional<std::size_t> N;
  std::optional<std::size_t> workers;
  std::string out;
  bool mot = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "scenario configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--rule", o.rule, "bdf2 or trapezoidal");
  cmd->add_option("--scheme", o.scheme, "standard or modified");
  cmd->add_option("--N", o.N, "number of time steps");
  cmd->add_option("--workers", o.workers, "worker threads (default: WAVECQ_WORKERS or all cores)");
  cmd->add_option("--out", o.out, "output directory");
}

Scenario load(const Overrides& o) {
  FlatConfig cfg = FlatConfig::load(o.config);
  if (!o.rule.empty()) cfg.set("time.rule", o.rule);
  if (!o.scheme.empty()) cfg.set("time.scheme", o.scheme);
  if (o.N) cfg.set("time.N", std::to_string(*o.N));
  if (o.workers) cfg.set("time.workers", std::to_string(*o.workers));
  if (!o.out.empty()) cfg.set("output.dir", o.out);
  if (o.mot) cfg.set("time.solver", "mot");
  return scenario_from_config(cfg);
}

int cmd_solve(const Overrides& o) {
  const Scenario sc = load(o);
  const ScenarioRun run = run_scenario(sc);
  const auto& rep = run.solve.report;
  std::printf("scenario %s: %s %s, N = %zu, %zux%zu system, %.3f s\n", sc.name.c_str(), rep.scheme.c_str(),
              rep.rule.c_str(), sc.N, rep.rows, rep.cols, rep.wall_seconds);
  std::printf("max residual %.3e, rank-deficient frequencies %zu, residual_imag %.3e%s\n", rep.max_residual(),
              rep.rank_deficient_count(), rep.residual_imag, rep.imag_warning ? " (WARNING: large)" : "");
  if (sc.incident.kind == IncidentKind::PlaneWave && sc.problem == Problem::Exterior) {
    std::printf("causality ratio %.3e\n", check_causality(run, OnsetModel::TravelTime).ratio());
  }
  std::printf("output written to %s\n", sc.output_dir.c_str());
  return 0;
}

int cmd_converge(const Overrides& o, const std::string& n_list, std::optional<std::size_t> ref_N,
                 std::optional<std::size_t> ref_M, std::optional<std::size_t> ref_K, bool own_only) {
  const Scenario sc = load(o);
  const auto Ns = parse_size_list(n_list, "--N-list");
  if (Ns.empty()) throw ConfigError("--N-list: at least one N is needed");
  ReferenceSpec ref = default_reference(sc, Ns);
  if (ref_N) ref.N = *ref_N;
  if (ref_M) ref.M = *ref_M;
  if (ref_K) ref.K = *ref_K;
  std::vector<Combination> combos = all_combinations();
  if (own_only) combos = {{sc.rule, sc.scheme}};
  const auto rows = convergence_study(sc, Ns, ref, combos);
  const std::string csv = error_table_csv(rows);
  std::filesystem::create_directories(sc.output_dir);
  const auto path = std::filesystem::path(sc.output_dir) / "errors.csv";
  std::ofstream(path) << csv;
  std::cout << csv;
  std::printf("reference: N = %zu, M = %zu, K = %zu; table written to %s\n", ref.N, ref.M, ref.K,
              path.string().c_str());
  return 0;
}

int cmd_snapshots(const Overrides& o, const std::string& times_text) {
  Scenario sc = load(o);
  const auto times = times_text.empty() ? sc.snapshot_times : parse_double_list(times_text, "--times");
  const auto files = render_snapshots(sc, times, sc.snapshot_grid);
  for (const auto& f : files) std::printf("%s\n", f.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-domain acoustic scattering with standard and modified convolution quadrature"};
  app.require_subcommand(1);

  Overrides solve_o, conv_o, snap_o;
  auto* solve = app.add_subcommand("solve", "solve one scenario and write its outputs");
  add_common(solve, solve_o);
  solve->add_flag("--mot", solve_o.mot, "march on in time instead of the all-at-once solve");

  auto* conv = app.add_subcommand("converge", "errors against a refined reference for several N");
  add_common(conv, conv_o);
  std::string n_list;
  std::optional<std::size_t> ref_N, ref_M, ref_K;
  bool own_only = false;
  conv->add_option("--N-list", n_list, "comma separated step counts")->required();
  conv->add_option("--reference-N", ref_N, "reference step count (default 4 * max N)");
  conv->add_option("--reference-M", ref_M, "reference collocation points or panels");
  conv->add_option("--reference-K", ref_K, "reference source points");
  conv->add_flag("--only-config-scheme", own_only, "only the rule and scheme of the configuration");

  auto* snap = app.add_subcommand("snapshots", "total field on a grid at selected times");
  add_common(snap, snap_o);
  std::string times;
  snap->add_option("--times", times, "comma separated times (default from the configuration)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return cmd_solve(solve_o);
    if (conv->parsed()) return cmd_converge(conv_o, n_list, ref_N, ref_M, ref_K, own_only);
    if (snap->parsed()) return cmd_snapshots(snap_o, times);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const MotInfeasible& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
