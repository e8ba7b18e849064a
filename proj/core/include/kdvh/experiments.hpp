#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kdvh/imex.hpp"
#include "kdvh/model.hpp"
#include "kdvh/operators.hpp"
#include "kdvh/stage_solver.hpp"
#include "kdvh/time_loop.hpp"
#include "kdvh/traveling_wave.hpp"

namespace kdvh {

struct GridSpec {
  double xmin = -40.0;
  double xmax = 40.0;
  int n = 1024;
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::upwind_fd;
  int order = 8;  ///< ignored for the Fourier family
};

PeriodicGrid make_grid_from_spec(const GridSpec& spec);
OperatorSet make_operators(const GridSpec& grid, const OperatorSpec& op);

/// Pairwise estimated orders of convergence,
///   eoc[i] = log(err[i-1]/err[i]) / log(p[i-1]/p[i]);
/// entry 0 and entries with nonpositive errors are NaN (rendered as missing).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& params);

/// Least-squares slope of log10(y) against log10(x), skipping pairs with
/// nonpositive or nonfinite entries and y below `floor`. NaN when fewer than
/// two usable points remain.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                        double floor = 0.0);

/// Runs fn(0..count-1) on a worker pool (threads = 0 picks the hardware
/// concurrency); rethrows the first exception after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Periodic translation of a grid function by `shift` via a spectral phase
/// factor; exact for band-limited data.
std::vector<double> translate_periodic(const PeriodicGrid& grid, std::span<const double> profile,
                                       double shift);

/// One row of the relaxation-limit error table.
struct ApTableRow {
  double tau = 0.0;
  double err_u = 0.0, err_v = 0.0, err_w = 0.0;
  double eoc_u = 0.0, eoc_v = 0.0, eoc_w = 0.0;  // NaN on the first row
};

struct ApSweepConfig {
  std::string method = "ARS(2,2,2)";
  std::vector<double> taus = {1e-1, 1e-3, 1e-5, 1e-7, 1e-9};
  GridSpec grid{};
  OperatorSpec op{};
  double dt = 0.005;
  double t_final = 16.67;
  double wave_speed = 1.0 / 3.0;  ///< soliton speed (amplitude 3c)
  bool relaxation = false;
  std::optional<SolverBackend> backend{};
  int threads = 0;
};

/// Relaxation-limit sweep: integrates the three-field system for each tau
/// from well-prepared soliton data and measures the quadrature-norm gaps to
/// a single shared limit-equation run (same method, grid and step):
///   err_u = ||u - eta||_M, err_v = ||v - D- eta||_M, err_w = ||w - D D- eta||_M.
/// Failures are annotated with the tau of the offending run.
std::vector<ApTableRow> ap_sweep(const ApSweepConfig& cfg);

/// Error-vs-step curve of one (method, tau) pair against the exact
/// traveling-wave solution.
struct AaCurve {
  std::string method;
  double tau = 0.0;
  std::vector<double> dts;
  std::vector<double> err_u, err_v, err_w;
  double slope_u = 0.0, slope_v = 0.0, slope_w = 0.0;
};

struct AaStudyConfig {
  std::vector<std::string> methods = {"AGSA(3,4,2)", "SSP3-ImEx(3,4,3)", "ARS(2,2,2)",
                                      "ARK3(2)4L[2]SA"};
  std::vector<double> taus = {1e-5, 1e-9};
  std::vector<double> dts = {0.02, 0.01, 0.005, 0.0025, 0.00125};
  GridSpec grid{};
  OperatorSpec op{};
  double t_final = 4.8;
  double wave_speed = 1.0 / 3.0;
  /// The reference profile is solved on a grid refined by this factor and
  /// restricted to the run grid.
  int reference_refinement = 2;
  double solver_tol = 5e-12;  ///< solitary-wave solver residual target
  std::optional<SolverBackend> backend{};
  int threads = 0;
  double error_floor = 1e-13;  ///< points below this are excluded from slope fits
};

/// Step-size convergence study with exact solitary-wave initial data: the
/// solitary wave is computed per tau (solver on the refined grid, auxiliary
/// fields from the traveling-wave relations), evolved numerically, and
/// compared with its exact translation by c * t_final. Order-deterministic
/// over methods x taus.
std::vector<AaCurve> aa_study(const AaStudyConfig& cfg);

struct GrowthRecord {
  double t = 0.0;
  double error = 0.0;            ///< ||u - reference||_M
  double invariant_drift = 0.0;  ///< |I - I0| / |I0|
  double gamma = 1.0;
};

struct ErrorGrowthConfig {
  std::string model = "kdvh";  ///< "kdv" integrates the limit equation
  std::string method = "ARS(4,4,3)";
  GridSpec grid{-40.0, 40.0, 256};
  OperatorSpec op{};
  double tau = 1e-6;
  double dt = 0.05;
  double t_final = 333.34;
  double wave_speed = 1.0 / 3.0;
  bool relaxation = true;
  /// "soliton": error against the analytic limit soliton translated at speed
  /// c. "solitary_wave": error against the translated solitary-wave profile
  /// of the three-field system (solver-generated, also used as initial data).
  std::string reference = "soliton";
  std::optional<SolverBackend> backend{};
  int record_stride = 1;
};

struct ErrorGrowthResult {
  std::vector<GrowthRecord> records;
  IntegrationSummary summary;
  /// Log-log error slope fitted over the final decade t in [t_final/10, t_final].
  double slope_final_decade = 0.0;
  double max_invariant_drift = 0.0;
};

/// Long-time soliton run recording per-step error, invariant drift, and the
/// relaxation factor.
ErrorGrowthResult error_growth(const ErrorGrowthConfig& cfg);

struct OrderStudyConfig {
  std::string method = "ARS(2,2,2)";
  double tau = 1.0;
  GridSpec grid{-10.0, 10.0, 128};  ///< used with Fourier operators
  double t_final = 1.0;
  std::vector<double> dts = {0.2, 0.1, 0.05, 0.025};
  double dt_reference = 1.0 / 512.0;
  std::string reference_method = "ARK4(3)6L[2]SA";
  double error_floor = 1e-12;
};

struct OrderStudyResult {
  std::vector<double> dts;
  std::vector<double> errors;  ///< M-norm of the full state gap at t_final
  double observed_order = 0.0;
};

/// Time-stepping order measurement on a smooth non-stiff run: spectral
/// operators isolate the time error, the reference trajectory is a fine-step
/// run with a higher-order method.
OrderStudyResult observed_order(const OrderStudyConfig& cfg);

/// Generic single run (CLI `solve`).
struct RunConfig {
  std::string model = "kdvh";  ///< "kdv" | "kdvh"
  std::string method = "ARS(2,2,2)";
  GridSpec grid{};
  OperatorSpec op{};
  double tau = 1e-2;
  double dt = 0.01;
  double t_final = 1.0;
  std::string initial = "soliton";  ///< "soliton" | "solitary_wave" | "smooth"
  double wave_speed = 1.0 / 3.0;
  bool relaxation = false;
  std::optional<SolverBackend> backend{};
};

struct RunResult {
  PeriodicGrid grid;
  std::vector<double> state;  ///< flat [u|v|w] (three-field) or eta (limit)
  IntegrationSummary summary;
  double invariant_initial = 0.0;
  double invariant_final = 0.0;
};

RunResult run_config(const RunConfig& cfg);

/// Smooth low-mode periodic profile used by order studies and generic runs.
std::vector<double> smooth_profile(const PeriodicGrid& grid);

}  // namespace kdvh
