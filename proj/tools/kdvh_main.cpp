/// kdvh: batch command-line laboratory for the three-field hyperbolic
/// approximation of the KdV equation.
///
/// Every subcommand writes <name>.csv plus <name>.meta.json into the output
/// directory. The metadata carries the fully resolved configuration, its
/// FNV-1a fingerprint, and the headline results; it never contains
/// timestamps, so reruns of the same configuration produce identical
/// artifacts. Options can come from a configuration file (key = value with
/// [subcommand] sections, see --config) and are overridable by flags.
///
/// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kdvh/experiments.hpp"
#include "kdvh/imex.hpp"
#include "kdvh/io.hpp"
#include "kdvh/model.hpp"
#include "kdvh/operators.hpp"
#include "kdvh/stage_solver.hpp"
#include "kdvh/traveling_wave.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalFailure = 2;

constexpr double kPi = 3.14159265358979323846;

std::string f(double x) { return kdvh::format_full(x); }

/// Writes <name>.meta.json next to the CSV. The config hash fingerprints the
/// canonical dump of the resolved configuration object.
void write_meta(const std::filesystem::path& out_dir, const std::string& name,
                const std::string& subcommand, const json& config, const json& results,
                std::size_t csv_rows) {
  json meta;
  meta["tool"] = "kdvh";
  meta["subcommand"] = subcommand;
  meta["config"] = config;
  meta["config_hash"] = kdvh::hash_hex(kdvh::fnv1a_hash(config.dump()));
  meta["artifacts"] = {{"csv", name + ".csv"}, {"rows", csv_rows}};
  meta["results"] = results;
  kdvh::write_text_file(out_dir / (name + ".meta.json"), meta.dump(2) + "\n");
}

kdvh::CsvWriter open_csv(const std::filesystem::path& out_dir, const std::string& name) {
  std::filesystem::create_directories(out_dir);
  return kdvh::CsvWriter(out_dir / (name + ".csv"));
}

json summary_json(const kdvh::IntegrationSummary& s) {
  return {{"t_end", s.t_end},
          {"steps", s.steps},
          {"degenerate_relaxations", s.degenerate_relaxations},
          {"out_of_range_relaxations", s.out_of_range_relaxations}};
}

// ---------------------------------------------------------------------------
// Shared option plumbing
// ---------------------------------------------------------------------------

struct CommonArgs {
  std::string out_dir = ".";
  std::string name;  ///< artifact stem; empty picks the subcommand slug
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--out", args.out_dir, "Output directory for <name>.csv and <name>.meta.json")
      ->capture_default_str();
  cmd->add_option("--name", args.name, "Artifact stem (default: subcommand name)");
}

std::string artifact_name(const CommonArgs& args, const std::string& fallback) {
  return args.name.empty() ? fallback : args.name;
}

void add_grid_options(CLI::App* cmd, kdvh::GridSpec& grid) {
  cmd->add_option("--xmin", grid.xmin, "Left domain endpoint")->capture_default_str();
  cmd->add_option("--xmax", grid.xmax, "Right domain endpoint")->capture_default_str();
  cmd->add_option("-n,--n", grid.n, "Number of grid points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_operator_options(CLI::App* cmd, std::string& kind, kdvh::OperatorSpec& op) {
  cmd->add_option("--kind", kind, "Operator family: fd|fourier")
      ->check(CLI::IsMember({"fd", "upwind", "upwind_fd", "fourier", "spectral"}))
      ->capture_default_str();
  cmd->add_option("--order", op.order, "Upwind accuracy order (1..8); ignored for fourier")
      ->check(CLI::Range(1, 8))
      ->capture_default_str();
}

kdvh::OperatorSpec resolve_operator(const std::string& kind, kdvh::OperatorSpec op) {
  op.kind = kdvh::operator_kind_from_string(kind);
  return op;
}

void add_relaxation_option(CLI::App* cmd, std::string& value) {
  cmd->add_option("--relaxation", value, "Invariant-conserving step scaling: on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
}

void add_backend_option(CLI::App* cmd, std::string& value) {
  cmd->add_option("--backend", value, "Stage solver backend: auto|sparse_lu|spectral|dense")
      ->check(CLI::IsMember({"auto", "sparse_lu", "spectral", "dense"}))
      ->capture_default_str();
}

std::optional<kdvh::SolverBackend> resolve_backend(const std::string& value) {
  if (value == "auto") return std::nullopt;
  if (value == "sparse_lu") return kdvh::SolverBackend::sparse_lu;
  if (value == "spectral") return kdvh::SolverBackend::spectral;
  return kdvh::SolverBackend::dense;
}

json grid_json(const kdvh::GridSpec& g) {
  return {{"xmin", g.xmin}, {"xmax", g.xmax}, {"n", g.n}};
}

json operator_json(const kdvh::OperatorSpec& op) {
  return {{"kind", kdvh::to_string(op.kind)}, {"order", op.order}};
}

// ---------------------------------------------------------------------------
// operators check
// ---------------------------------------------------------------------------

struct OperatorsCheckArgs {
  CommonArgs common;
  kdvh::GridSpec grid{-40.0, 40.0, 256};
  std::string kind = "all";  ///< all | fd | fourier
  int order = 0;             ///< 0 checks every upwind order
};

int run_operators_check(const OperatorsCheckArgs& args) {
  const kdvh::PeriodicGrid grid = kdvh::make_grid_from_spec(args.grid);
  std::vector<kdvh::OperatorSet> families;
  if (args.kind == "all" || args.kind == "fd") {
    for (int q = 1; q <= 8; ++q) {
      if (args.order == 0 || args.order == q) {
        families.push_back(kdvh::make_upwind_operators(grid, q));
      }
    }
  }
  if (args.kind == "all" || args.kind == "fourier") {
    families.push_back(kdvh::make_fourier_operator(grid));
  }
  if (families.empty()) {
    throw std::invalid_argument("operators check: no family matches kind '" + args.kind +
                                "' with order " + std::to_string(args.order));
  }

  const std::string name = artifact_name(args.common, "operators-check");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  const std::vector<std::string> header = {
      "kind",        "order",    "n",        "dx",      "central_skew_residual",
      "upwind_duality_residual", "dissipation_max_quadratic", "consistency_residual",
      "accuracy_residual",       "fourier_pair_mismatch",     "passed"};
  csv.write_header(header);

  json reports = json::array();
  bool all_passed = true;
  for (const kdvh::OperatorSet& ops : families) {
    const kdvh::OperatorCheckReport rep = kdvh::self_check(ops);
    all_passed = all_passed && rep.passed;
    reports.push_back(json::parse(rep.to_json()));
    const std::vector<std::string> row = {
        rep.kind,
        std::to_string(rep.order),
        std::to_string(rep.n),
        f(rep.dx),
        f(rep.central_skew_residual),
        f(rep.upwind_duality_residual),
        f(rep.dissipation_max_quadratic),
        f(rep.consistency_residual),
        f(rep.accuracy_residual),
        f(rep.fourier_pair_mismatch),
        rep.passed ? "1" : "0"};
    csv.write_row(row);
  }
  csv.flush();

  const json config = {{"grid", grid_json(args.grid)}, {"kind", args.kind}, {"order", args.order}};
  const json results = {{"families", families.size()},
                        {"all_passed", all_passed},
                        {"reports", reports}};
  write_meta(args.common.out_dir, name, "operators check", config, results, csv.rows_written());
  std::printf("operators check: %zu families, %s\n", families.size(),
              all_passed ? "all identities hold" : "IDENTITY FAILURE");
  return all_passed ? kOk : kNumericalFailure;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
  CommonArgs common;
  kdvh::RunConfig run;
  std::string kind = "fd";
  std::string relaxation = "off";
  std::string backend = "auto";
};

int run_solve(const SolveArgs& args) {
  kdvh::RunConfig cfg = args.run;
  cfg.op = resolve_operator(args.kind, cfg.op);
  cfg.relaxation = args.relaxation == "on";
  cfg.backend = resolve_backend(args.backend);

  const kdvh::RunResult res = kdvh::run_config(cfg);
  const int n = res.grid.n;
  const bool three_field = res.state.size() == static_cast<std::size_t>(3 * n);

  const std::string name = artifact_name(args.common, "solve");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  if (three_field) {
    csv.write_header(std::vector<std::string>{"x", "u", "v", "w"});
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      csv.write_values(std::vector<double>{res.grid.nodes[k], res.state[k],
                                           res.state[static_cast<std::size_t>(n) + k],
                                           res.state[2 * static_cast<std::size_t>(n) + k]});
    }
  } else {
    csv.write_header(std::vector<std::string>{"x", "eta"});
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      csv.write_values(std::vector<double>{res.grid.nodes[k], res.state[k]});
    }
  }
  csv.flush();

  const bool finite = std::all_of(res.state.begin(), res.state.end(),
                                  [](double x) { return std::isfinite(x); });
  const double denom = std::max(1e-300, std::abs(res.invariant_initial));
  const json config = {{"model", cfg.model},
                       {"method", cfg.method},
                       {"grid", grid_json(cfg.grid)},
                       {"operator", operator_json(cfg.op)},
                       {"tau", cfg.tau},
                       {"dt", cfg.dt},
                       {"t_final", cfg.t_final},
                       {"initial", cfg.initial},
                       {"wave_speed", cfg.wave_speed},
                       {"relaxation", cfg.relaxation},
                       {"backend", args.backend}};
  const json results = {{"summary", summary_json(res.summary)},
                        {"invariant_initial", res.invariant_initial},
                        {"invariant_final", res.invariant_final},
                        {"invariant_relative_drift",
                         std::abs(res.invariant_final - res.invariant_initial) / denom},
                        {"finite", finite}};
  write_meta(args.common.out_dir, name, "solve", config, results, csv.rows_written());
  std::printf("solve: %s %s to t=%g, %lld steps, invariant drift %.3e%s\n", cfg.model.c_str(),
              cfg.method.c_str(), res.summary.t_end, res.summary.steps,
              std::abs(res.invariant_final - res.invariant_initial) / denom,
              finite ? "" : ", NON-FINITE STATE");
  return finite ? kOk : kNumericalFailure;
}

// ---------------------------------------------------------------------------
// ap-table
// ---------------------------------------------------------------------------

struct ApTableArgs {
  CommonArgs common;
  kdvh::ApSweepConfig cfg;
  std::string kind = "fd";
  std::string relaxation = "off";
  std::string backend = "auto";
};

int run_ap_table(const ApTableArgs& args) {
  kdvh::ApSweepConfig cfg = args.cfg;
  cfg.op = resolve_operator(args.kind, cfg.op);
  cfg.relaxation = args.relaxation == "on";
  cfg.backend = resolve_backend(args.backend);

  const std::vector<kdvh::ApTableRow> rows = kdvh::ap_sweep(cfg);

  const std::string name = artifact_name(args.common, "ap-table");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  csv.write_header(
      std::vector<std::string>{"tau", "err_u", "err_v", "err_w", "eoc_u", "eoc_v", "eoc_w"});
  json table = json::array();
  for (const kdvh::ApTableRow& r : rows) {
    csv.write_values(
        std::vector<double>{r.tau, r.err_u, r.err_v, r.err_w, r.eoc_u, r.eoc_v, r.eoc_w});
    table.push_back({{"tau", r.tau},
                     {"err_u", r.err_u},
                     {"err_v", r.err_v},
                     {"err_w", r.err_w},
                     {"eoc_u", r.eoc_u},
                     {"eoc_v", r.eoc_v},
                     {"eoc_w", r.eoc_w}});
  }
  csv.flush();

  const json config = {{"method", cfg.method},
                       {"taus", cfg.taus},
                       {"grid", grid_json(cfg.grid)},
                       {"operator", operator_json(cfg.op)},
                       {"dt", cfg.dt},
                       {"t_final", cfg.t_final},
                       {"wave_speed", cfg.wave_speed},
                       {"relaxation", cfg.relaxation},
                       {"backend", args.backend},
                       {"threads", cfg.threads}};
  const json results = {{"table", table}};
  write_meta(args.common.out_dir, name, "ap-table", config, results, csv.rows_written());
  std::printf("ap-table: %s, %zu tau rows written\n", cfg.method.c_str(), rows.size());
  return kOk;
}

// ---------------------------------------------------------------------------
// aa-study
// ---------------------------------------------------------------------------

struct AaStudyArgs {
  CommonArgs common;
  kdvh::AaStudyConfig cfg;
  std::string kind = "fd";
  std::string backend = "auto";
};

int run_aa_study(const AaStudyArgs& args) {
  kdvh::AaStudyConfig cfg = args.cfg;
  cfg.op = resolve_operator(args.kind, cfg.op);
  cfg.backend = resolve_backend(args.backend);

  const std::vector<kdvh::AaCurve> curves = kdvh::aa_study(cfg);

  const std::string name = artifact_name(args.common, "aa-study");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  csv.write_header(std::vector<std::string>{"method", "tau", "dt", "err_u", "err_v", "err_w",
                                            "slope_u", "slope_v", "slope_w"});
  json slopes = json::array();
  for (const kdvh::AaCurve& c : curves) {
    for (std::size_t i = 0; i < c.dts.size(); ++i) {
      csv.write_row(std::vector<std::string>{c.method, f(c.tau), f(c.dts[i]), f(c.err_u[i]),
                                             f(c.err_v[i]), f(c.err_w[i]), f(c.slope_u),
                                             f(c.slope_v), f(c.slope_w)});
    }
    slopes.push_back({{"method", c.method},
                      {"tau", c.tau},
                      {"slope_u", c.slope_u},
                      {"slope_v", c.slope_v},
                      {"slope_w", c.slope_w}});
  }
  csv.flush();

  const json config = {{"methods", cfg.methods},
                       {"taus", cfg.taus},
                       {"dts", cfg.dts},
                       {"grid", grid_json(cfg.grid)},
                       {"operator", operator_json(cfg.op)},
                       {"t_final", cfg.t_final},
                       {"wave_speed", cfg.wave_speed},
                       {"reference_refinement", cfg.reference_refinement},
                       {"solver_tol", cfg.solver_tol},
                       {"backend", args.backend},
                       {"threads", cfg.threads},
                       {"error_floor", cfg.error_floor}};
  const json results = {{"curves", slopes}};
  write_meta(args.common.out_dir, name, "aa-study", config, results, csv.rows_written());
  std::printf("aa-study: %zu curves (%zu methods x %zu taus)\n", curves.size(),
              cfg.methods.size(), cfg.taus.size());
  return kOk;
}

// ---------------------------------------------------------------------------
// error-growth
// ---------------------------------------------------------------------------

struct ErrorGrowthArgs {
  CommonArgs common;
  kdvh::ErrorGrowthConfig cfg;
  std::string kind = "fd";
  std::string relaxation = "on";
  std::string backend = "auto";
};

int run_error_growth(const ErrorGrowthArgs& args) {
  kdvh::ErrorGrowthConfig cfg = args.cfg;
  cfg.op = resolve_operator(args.kind, cfg.op);
  cfg.relaxation = args.relaxation == "on";
  cfg.backend = resolve_backend(args.backend);

  const kdvh::ErrorGrowthResult res = kdvh::error_growth(cfg);

  const std::string name = artifact_name(args.common, "error-growth");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  csv.write_header(std::vector<std::string>{"t", "error", "invariant_drift", "gamma"});
  for (const kdvh::GrowthRecord& r : res.records) {
    csv.write_values(std::vector<double>{r.t, r.error, r.invariant_drift, r.gamma});
  }
  csv.flush();

  const json config = {{"model", cfg.model},
                       {"method", cfg.method},
                       {"grid", grid_json(cfg.grid)},
                       {"operator", operator_json(cfg.op)},
                       {"tau", cfg.tau},
                       {"dt", cfg.dt},
                       {"t_final", cfg.t_final},
                       {"wave_speed", cfg.wave_speed},
                       {"relaxation", cfg.relaxation},
                       {"reference", cfg.reference},
                       {"backend", args.backend},
                       {"record_stride", cfg.record_stride}};
  const json results = {{"summary", summary_json(res.summary)},
                        {"slope_final_decade", res.slope_final_decade},
                        {"max_invariant_drift", res.max_invariant_drift},
                        {"final_error", res.records.empty() ? 0.0 : res.records.back().error}};
  write_meta(args.common.out_dir, name, "error-growth", config, results, csv.rows_written());
  std::printf("error-growth: %zu records, final-decade slope %.3f, max invariant drift %.3e\n",
              res.records.size(), res.slope_final_decade, res.max_invariant_drift);
  return kOk;
}

// ---------------------------------------------------------------------------
// solitary-wave
// ---------------------------------------------------------------------------

struct SolitaryWaveArgs {
  CommonArgs common;
  kdvh::GridSpec grid{-30.0 * kPi, 30.0 * kPi, 512};
  double wave_speed = 1.0 / 3.0;
  double tau = 0.0;
  kdvh::PetviashviliOptions opts{};
};

int run_solitary_wave(const SolitaryWaveArgs& args) {
  const kdvh::PeriodicGrid grid = kdvh::make_grid_from_spec(args.grid);
  const kdvh::TravelingWaveParams p{args.wave_speed, args.tau};
  const std::vector<double> guess = kdvh::limit_soliton_profile(grid, p.c);
  const kdvh::PetviashviliResult res = kdvh::petviashvili_solve(grid, p, guess, args.opts);
  const kdvh::TravelingWaveFields fields = kdvh::tw_auxiliaries(grid, p, res.profile);

  const std::string name = artifact_name(args.common, "solitary-wave");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  csv.write_header(std::vector<std::string>{"x", "u", "v", "w"});
  for (int i = 0; i < grid.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    csv.write_values(std::vector<double>{grid.nodes[k], fields.u[k], fields.v[k], fields.w[k]});
  }
  csv.flush();

  const kdvh::OperatorSet ops = kdvh::make_fourier_operator(grid);
  const auto [r1, r2] = kdvh::tw_constraint_residual(ops, p, fields.u, fields.v, fields.w);
  const double peak = *std::max_element(fields.u.begin(), fields.u.end());

  const json config = {{"grid", grid_json(args.grid)},
                       {"wave_speed", args.wave_speed},
                       {"tau", args.tau},
                       {"tol", args.opts.tol},
                       {"max_iter", args.opts.max_iter},
                       {"divergence_window", args.opts.divergence_window}};
  const json results = {{"converged", res.converged},
                        {"iterations", res.iterations},
                        {"final_residual", res.final_residual},
                        {"peak_amplitude", peak},
                        {"constraint_residual_v", r1},
                        {"constraint_residual_w", r2}};
  write_meta(args.common.out_dir, name, "solitary-wave", config, results, csv.rows_written());
  std::printf("solitary-wave: c=%g tau=%g, %s in %d iterations, residual %.3e, peak %.6f\n",
              p.c, p.tau, res.converged ? "converged" : "NOT CONVERGED", res.iterations,
              res.final_residual, peak);
  return res.converged ? kOk : kNumericalFailure;
}

// ---------------------------------------------------------------------------
// phase-portrait
// ---------------------------------------------------------------------------

struct PhasePortraitArgs {
  CommonArgs common;
  double wave_speed = 1.0;
  double tau = 0.4;
  int field_n = 31;  ///< lattice points per axis; 0 disables field sampling
  std::vector<double> u_range;  ///< two entries; empty picks a c-aware window
  std::vector<double> v_range;
  std::vector<std::string> orbit_starts;  ///< "u0,v0" launch points
  bool homoclinic = false;
  double homoclinic_eps = 1e-8;
  kdvh::OrbitConfig orbit{};
};

kdvh::PhasePoint parse_point(const std::string& text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("orbit start '" + text + "' is not of the form u0,v0");
  }
  std::size_t used_u = 0;
  std::size_t used_v = 0;
  kdvh::PhasePoint pt;
  try {
    pt.u_tilde = std::stod(text.substr(0, comma), &used_u);
    pt.v_tilde = std::stod(text.substr(comma + 1), &used_v);
  } catch (const std::exception&) {
    throw std::invalid_argument("orbit start '" + text + "' is not of the form u0,v0");
  }
  if (used_u != comma || used_v != text.size() - comma - 1) {
    throw std::invalid_argument("orbit start '" + text + "' is not of the form u0,v0");
  }
  return pt;
}

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

int run_phase_portrait(const PhasePortraitArgs& args) {
  const kdvh::TravelingWaveParams p{args.wave_speed, args.tau};
  if (!args.u_range.empty() && args.u_range.size() != 2) {
    throw std::invalid_argument("--u-range expects exactly two values");
  }
  if (!args.v_range.empty() && args.v_range.size() != 2) {
    throw std::invalid_argument("--v-range expects exactly two values");
  }
  const double c_abs = std::abs(p.c);
  const double pad = 0.75 * (1.0 + c_abs);
  const double umin = args.u_range.empty() ? std::min(0.0, 2.0 * p.c) - pad : args.u_range[0];
  const double umax = args.u_range.empty() ? std::max(0.0, 2.0 * p.c) + pad : args.u_range[1];
  const double vmax = args.v_range.empty() ? 1.0 + c_abs : args.v_range[1];
  const double vmin = args.v_range.empty() ? -vmax : args.v_range[0];
  if (!(umax > umin) || !(vmax > vmin)) {
    throw std::invalid_argument("phase-portrait window is empty");
  }

  const std::string name = artifact_name(args.common, "phase-portrait");
  kdvh::CsvWriter csv = open_csv(args.common.out_dir, name);
  csv.write_header(std::vector<std::string>{"series", "orbit", "xi", "u", "v", "fu", "fv", "h"});

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (args.field_n > 1) {
    for (int i = 0; i < args.field_n; ++i) {
      for (int j = 0; j < args.field_n; ++j) {
        kdvh::PhasePoint pt;
        pt.u_tilde = umin + (umax - umin) * i / (args.field_n - 1);
        pt.v_tilde = vmin + (vmax - vmin) * j / (args.field_n - 1);
        double fu = nan;
        double fv = nan;
        try {
          const kdvh::PhasePoint rhs = kdvh::tw_vector_field(p, pt);
          fu = rhs.u_tilde;
          fv = rhs.v_tilde;
        } catch (const std::domain_error&) {
          // Singular-line proximity: the field magnitude is not representable.
        }
        csv.write_row(std::vector<std::string>{"field", "", "", f(pt.u_tilde), f(pt.v_tilde),
                                               f(fu), f(fv), f(kdvh::first_integral(p, pt))});
      }
    }
  }

  std::vector<kdvh::PhasePoint> starts;
  if (args.homoclinic) {
    starts.push_back(kdvh::homoclinic_launch_points(p, args.homoclinic_eps)[0]);
  }
  for (const std::string& text : args.orbit_starts) starts.push_back(parse_point(text));

  json orbit_results = json::array();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const kdvh::OrbitResult orbit = kdvh::integrate_orbit(p, starts[k], args.orbit);
    for (const kdvh::OrbitSample& s : orbit.samples) {
      csv.write_row(std::vector<std::string>{
          "orbit", std::to_string(k), f(s.xi), f(s.u_tilde), f(s.v_tilde), "", "",
          f(kdvh::first_integral(p, {s.u_tilde, s.v_tilde}))});
    }
    orbit_results.push_back({{"start", json::array({starts[k].u_tilde, starts[k].v_tilde})},
                             {"classification", kdvh::to_string(orbit.classification)},
                             {"h_drift", orbit.h_drift},
                             {"max_u", orbit.max_u_tilde},
                             {"step_used", orbit.step_used},
                             {"xi_end", orbit.xi_end},
                             {"samples", orbit.samples.size()}});
  }
  csv.flush();

  const kdvh::EquilibriumReport eq = kdvh::classify_equilibria(p);
  const json config = {{"wave_speed", p.c},
                       {"tau", p.tau},
                       {"field_n", args.field_n},
                       {"u_range", json::array({umin, umax})},
                       {"v_range", json::array({vmin, vmax})},
                       {"homoclinic", args.homoclinic},
                       {"homoclinic_eps", args.homoclinic_eps},
                       {"orbit_starts", args.orbit_starts},
                       {"initial_step", args.orbit.initial_step},
                       {"max_xi", args.orbit.max_xi},
                       {"h_drift_tol", args.orbit.h_drift_tol}};
  const json results = {
      {"equilibria",
       {{"origin_eigenvalues",
         json::array({complex_json(eq.origin_eigenvalues[0]),
                      complex_json(eq.origin_eigenvalues[1])})},
        {"secondary_eigenvalues",
         json::array({complex_json(eq.secondary_eigenvalues[0]),
                      complex_json(eq.secondary_eigenvalues[1])})},
        {"origin_is_saddle", eq.origin_is_saddle},
        {"secondary_is_center", eq.secondary_is_center}}},
      {"orbits", orbit_results}};
  write_meta(args.common.out_dir, name, "phase-portrait", config, results, csv.rows_written());
  std::printf("phase-portrait: c=%g tau=%g, %s at origin, %zu orbit(s)\n", p.c, p.tau,
              eq.origin_is_saddle ? "saddle" : "center", starts.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver laboratory for the hyperbolic approximation of the KdV equation"};
  app.set_config("--config", "", "Configuration file (key = value, [subcommand] sections)");
  app.require_subcommand(1);

  int rc = kOk;

  // operators check -------------------------------------------------------
  auto operators_args = std::make_shared<OperatorsCheckArgs>();
  CLI::App* operators_cmd = app.add_subcommand("operators", "Operator family audits");
  operators_cmd->require_subcommand(1);
  CLI::App* check_cmd =
      operators_cmd->add_subcommand("check", "Recompute and report the operator identity residuals");
  add_common_options(check_cmd, operators_args->common);
  add_grid_options(check_cmd, operators_args->grid);
  check_cmd->add_option("--kind", operators_args->kind, "Family selection: all|fd|fourier")
      ->check(CLI::IsMember({"all", "fd", "fourier"}))
      ->capture_default_str();
  check_cmd
      ->add_option("--order", operators_args->order,
                   "Restrict the upwind audit to one order (0 checks 1..8)")
      ->check(CLI::Range(0, 8))
      ->capture_default_str();
  check_cmd->callback([&rc, operators_args] { rc = run_operators_check(*operators_args); });

  // solve ------------------------------------------------------------------
  auto solve_args = std::make_shared<SolveArgs>();
  CLI::App* solve_cmd = app.add_subcommand("solve", "Integrate one configuration to t_final");
  add_common_options(solve_cmd, solve_args->common);
  solve_cmd->add_option("--model", solve_args->run.model, "kdv|kdvh")
      ->check(CLI::IsMember({"kdv", "kdvh"}))
      ->capture_default_str();
  solve_cmd->add_option("--method", solve_args->run.method, "Time integrator name")
      ->capture_default_str();
  add_grid_options(solve_cmd, solve_args->run.grid);
  add_operator_options(solve_cmd, solve_args->kind, solve_args->run.op);
  solve_cmd->add_option("--tau", solve_args->run.tau, "Relaxation parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_cmd->add_option("--dt", solve_args->run.dt, "Time step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_cmd->add_option("--t-final", solve_args->run.t_final, "Final time")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd
      ->add_option("--initial", solve_args->run.initial, "soliton|solitary_wave|smooth")
      ->check(CLI::IsMember({"soliton", "solitary_wave", "smooth"}))
      ->capture_default_str();
  solve_cmd->add_option("--wave-speed", solve_args->run.wave_speed, "Soliton speed c")
      ->capture_default_str();
  add_relaxation_option(solve_cmd, solve_args->relaxation);
  add_backend_option(solve_cmd, solve_args->backend);
  solve_cmd->callback([&rc, solve_args] { rc = run_solve(*solve_args); });

  // ap-table ----------------------------------------------------------------
  auto ap_args = std::make_shared<ApTableArgs>();
  CLI::App* ap_cmd =
      app.add_subcommand("ap-table", "Relaxation-limit error table over a tau sweep");
  add_common_options(ap_cmd, ap_args->common);
  ap_cmd->add_option("--method", ap_args->cfg.method, "Time integrator name")
      ->capture_default_str();
  ap_cmd->add_option("--tau", ap_args->cfg.taus, "Descending tau values")
      ->expected(-1)
      ->capture_default_str();
  add_grid_options(ap_cmd, ap_args->cfg.grid);
  add_operator_options(ap_cmd, ap_args->kind, ap_args->cfg.op);
  ap_cmd->add_option("--dt", ap_args->cfg.dt, "Time step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ap_cmd->add_option("--t-final", ap_args->cfg.t_final, "Final time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ap_cmd->add_option("--wave-speed", ap_args->cfg.wave_speed, "Soliton speed c (amplitude 3c)")
      ->capture_default_str();
  add_relaxation_option(ap_cmd, ap_args->relaxation);
  add_backend_option(ap_cmd, ap_args->backend);
  ap_cmd->add_option("--threads", ap_args->cfg.threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
  ap_cmd->callback([&rc, ap_args] { rc = run_ap_table(*ap_args); });

  // aa-study ----------------------------------------------------------------
  auto aa_args = std::make_shared<AaStudyArgs>();
  CLI::App* aa_cmd =
      app.add_subcommand("aa-study", "Step-size convergence study against exact solitary waves");
  add_common_options(aa_cmd, aa_args->common);
  aa_cmd->add_option("--method", aa_args->cfg.methods, "Time integrator names")
      ->expected(-1)
      ->capture_default_str();
  aa_cmd->add_option("--tau", aa_args->cfg.taus, "Relaxation parameters")
      ->expected(-1)
      ->capture_default_str();
  aa_cmd->add_option("--dt", aa_args->cfg.dts, "Step sizes")
      ->expected(-1)
      ->capture_default_str();
  add_grid_options(aa_cmd, aa_args->cfg.grid);
  add_operator_options(aa_cmd, aa_args->kind, aa_args->cfg.op);
  aa_cmd->add_option("--t-final", aa_args->cfg.t_final, "Final time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  aa_cmd->add_option("--wave-speed", aa_args->cfg.wave_speed, "Solitary-wave speed c")
      ->capture_default_str();
  aa_cmd->add_option("--solver-tol", aa_args->cfg.solver_tol, "Reference profile residual target")
      ->capture_default_str();
  add_backend_option(aa_cmd, aa_args->backend);
  aa_cmd->add_option("--threads", aa_args->cfg.threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
  aa_cmd->callback([&rc, aa_args] { rc = run_aa_study(*aa_args); });

  // error-growth -------------------------------------------------------------
  auto growth_args = std::make_shared<ErrorGrowthArgs>();
  CLI::App* growth_cmd =
      app.add_subcommand("error-growth", "Long-time soliton error and invariant drift series");
  add_common_options(growth_cmd, growth_args->common);
  growth_cmd->add_option("--model", growth_args->cfg.model, "kdv|kdvh")
      ->check(CLI::IsMember({"kdv", "kdvh"}))
      ->capture_default_str();
  growth_cmd->add_option("--method", growth_args->cfg.method, "Time integrator name")
      ->capture_default_str();
  add_grid_options(growth_cmd, growth_args->cfg.grid);
  add_operator_options(growth_cmd, growth_args->kind, growth_args->cfg.op);
  growth_cmd->add_option("--tau", growth_args->cfg.tau, "Relaxation parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  growth_cmd->add_option("--dt", growth_args->cfg.dt, "Time step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  growth_cmd->add_option("--t-final", growth_args->cfg.t_final, "Final time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  growth_cmd->add_option("--wave-speed", growth_args->cfg.wave_speed, "Soliton speed c")
      ->capture_default_str();
  growth_cmd
      ->add_option("--reference", growth_args->cfg.reference,
                   "Error reference: soliton|solitary_wave")
      ->check(CLI::IsMember({"soliton", "solitary_wave"}))
      ->capture_default_str();
  add_relaxation_option(growth_cmd, growth_args->relaxation);
  add_backend_option(growth_cmd, growth_args->backend);
  growth_cmd
      ->add_option("--record-stride", growth_args->cfg.record_stride,
                   "Record every k-th step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  growth_cmd->callback([&rc, growth_args] { rc = run_error_growth(*growth_args); });

  // solitary-wave -------------------------------------------------------------
  auto wave_args = std::make_shared<SolitaryWaveArgs>();
  CLI::App* wave_cmd =
      app.add_subcommand("solitary-wave", "Fixed-point solve of the traveling-wave profile");
  add_common_options(wave_cmd, wave_args->common);
  add_grid_options(wave_cmd, wave_args->grid);
  wave_cmd->add_option("--wave-speed,-c", wave_args->wave_speed, "Wave speed c > 0")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  wave_cmd->add_option("--tau", wave_args->tau, "Relaxation parameter (0 = limit equation)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  wave_cmd->add_option("--tol", wave_args->opts.tol, "Residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  wave_cmd->add_option("--max-iter", wave_args->opts.max_iter, "Iteration budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  wave_cmd->callback([&rc, wave_args] { rc = run_solitary_wave(*wave_args); });

  // phase-portrait -------------------------------------------------------------
  auto portrait_args = std::make_shared<PhasePortraitArgs>();
  CLI::App* portrait_cmd =
      app.add_subcommand("phase-portrait", "Traveling-wave vector field and orbit data");
  add_common_options(portrait_cmd, portrait_args->common);
  portrait_cmd->add_option("--wave-speed,-c", portrait_args->wave_speed, "Wave speed c")
      ->capture_default_str();
  portrait_cmd->add_option("--tau", portrait_args->tau, "Relaxation parameter")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  portrait_cmd
      ->add_option("--field-n", portrait_args->field_n,
                   "Vector-field lattice points per axis (0 disables)")
      ->check(CLI::Range(0, 4096))
      ->capture_default_str();
  portrait_cmd->add_option("--u-range", portrait_args->u_range, "Window umin umax")
      ->expected(2);
  portrait_cmd->add_option("--v-range", portrait_args->v_range, "Window vmin vmax")
      ->expected(2);
  portrait_cmd->add_option("--orbit", portrait_args->orbit_starts,
                           "Orbit launch point 'u0,v0' (repeatable)");
  portrait_cmd->add_flag("--homoclinic", portrait_args->homoclinic,
                         "Launch from the saddle along the unstable direction");
  portrait_cmd
      ->add_option("--homoclinic-eps", portrait_args->homoclinic_eps,
                   "Offset of the homoclinic launch point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  portrait_cmd->add_option("--max-xi", portrait_args->orbit.max_xi, "Orbit length budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  portrait_cmd
      ->add_option("--initial-step", portrait_args->orbit.initial_step, "Orbit sweep step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  portrait_cmd
      ->add_option("--h-drift-tol", portrait_args->orbit.h_drift_tol,
                   "First-integral drift tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  portrait_cmd->callback([&rc, portrait_args] { rc = run_phase_portrait(*portrait_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "kdvh: configuration error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "kdvh: numerical failure: %s\n", e.what());
    return kNumericalFailure;
  }
  return rc;
}
