#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kdvh/grid.hpp"
#include "kdvh/operators.hpp"

namespace kdvh {

/// Parameters of the traveling-wave ansatz u(x, t) = u~(x - c t).
///
/// tau = 0 is accepted and selects the formal relaxation limit, in which the
/// phase-plane system and the solitary-wave equation reduce to their
/// third-derivative counterparts.
struct TravelingWaveParams {
  double c = 1.0;    ///< signed wave speed
  double tau = 0.0;  ///< relaxation parameter, >= 0

  /// Derived combination alpha = c * tau used throughout the constraints.
  double alpha() const { return c * tau; }
};

/// Point (u~, v~) of the reduced phase plane.
struct PhasePoint {
  double u_tilde = 0.0;
  double v_tilde = 0.0;
};

/// Denominator 1 + c tau (u~ - c) of the phase-plane vector field. The field
/// is singular on the line where this vanishes.
double singular_denominator(const TravelingWaveParams& p, double u_tilde);

/// True when u~ is within the proximity threshold (1e-10 relative to
/// max(1, |c tau|)) of the singular line.
bool near_singular_line(const TravelingWaveParams& p, double u_tilde);

/// Right-hand side of the traveling-wave phase-plane system
///   u~' = v~ / (1 + c tau (u~ - c)),
///   v~' = (c - u~/2) u~ / (1 + c tau).
/// Throws std::domain_error when pt is within the singular-line proximity
/// threshold; orbit integration treats that situation as a terminal event
/// instead of calling through.
PhasePoint tw_vector_field(const TravelingWaveParams& p, const PhasePoint& pt);

/// First integral
///   H(u~, v~) = v~^2/2
///             - u~^2/(1+c tau) (-c tau/8 u~^2 + (3c^2 tau - 1)/6 u~ + c(1 - c^2 tau)/2),
/// constant along orbits of tw_vector_field; the homoclinic orbit lies on
/// the level set H = 0.
double first_integral(const TravelingWaveParams& p, const PhasePoint& pt);

/// Eigenvalue data of the two equilibria (0, 0) and (2c, 0).
struct EquilibriumReport {
  std::array<std::complex<double>, 2> origin_eigenvalues{};
  std::array<std::complex<double>, 2> secondary_eigenvalues{};
  /// Real eigenvalue pair of opposite signs at the origin; holds exactly when
  /// 1/tau > c^2 (with the tau = 0 limit counted as saddle for c > 0).
  bool origin_is_saddle = false;
  /// Purely imaginary pair at (2c, 0).
  bool secondary_is_center = false;
};

/// Classifies both equilibria through a numerical eigensolve of the exact
/// 2x2 Jacobians of tw_vector_field.
EquilibriumReport classify_equilibria(const TravelingWaveParams& p);

/// Launch points saddle +/- eps * (unit unstable eigenvector) for homoclinic
/// orbits; index 0 points into the half plane u~ > 0. Requires the origin to
/// be a saddle.
std::array<PhasePoint, 2> homoclinic_launch_points(const TravelingWaveParams& p,
                                                   double eps = 1e-8);

/// Orbit termination classes. `undetermined` is reported when the length
/// budget runs out before any terminal event; the other four values follow
/// the phase-portrait taxonomy.
enum class OrbitClass : std::uint8_t {
  homoclinic,
  periodic,
  singular_hit,
  escaped,
  undetermined,
};

const char* to_string(OrbitClass c);

/// One stored state (xi, u~, v~) along an orbit.
struct OrbitSample {
  double xi = 0.0;
  double u_tilde = 0.0;
  double v_tilde = 0.0;
};

struct OrbitConfig {
  double initial_step = 1e-3;  ///< xi step of the classical RK4 sweep
  double max_xi = 400.0;       ///< orbit length budget per attempt
  /// Maximum tolerated |H - H(start)| along the orbit. When exceeded, the
  /// whole sweep restarts with the step halved.
  double h_drift_tol = 1e-10;
  int max_halvings = 14;       ///< step-halving budget before giving up
  double escape_radius = 1e3;  ///< |(u~, v~)| beyond which the orbit escaped
  /// Orbits re-entering this ball radius (relative to the orbit amplitude)
  /// around the origin after leaving it are classified homoclinic.
  double saddle_return_radius = 1e-3;
  /// Return-to-start distance (relative to the orbit amplitude) for the
  /// periodic classification.
  double closure_radius = 1e-4;
  long long max_steps = 20000000;           ///< per-sweep step budget
  std::size_t max_stored_samples = 100000;  ///< stored samples are thinned beyond this
};

/// Result of one phase-plane orbit integration.
struct OrbitResult {
  std::vector<OrbitSample> samples;  ///< thinned to at most max_stored_samples
  OrbitClass classification = OrbitClass::undetermined;
  /// Max |H - H(start)| along the accepted sweep. For singular-line hits the
  /// value covers the stored samples, which stop short of the structurally
  /// stiff terminal approach.
  double h_drift = 0.0;
  double max_u_tilde = 0.0;  ///< largest u~ seen (homoclinic peak amplitude)
  double step_used = 0.0;    ///< step of the accepted sweep
  double xi_end = 0.0;
  PhasePoint last{};
};

/// Integrates the phase-plane system with fixed-step classical RK4,
/// restarting with a halved step whenever the first-integral drift exceeds
/// config.h_drift_tol. Terminal events: singular-line approach
/// (singular_hit), re-entry into the saddle ball (homoclinic), return to the
/// start point (periodic), leaving the escape radius (escaped).
OrbitResult integrate_orbit(const TravelingWaveParams& p, const PhasePoint& start,
                            const OrbitConfig& config = {});

/// Solitary-wave profile u together with the auxiliary fields v, w of the
/// traveling-wave constraints v = u' - alpha w', w = (1 + alpha) v'.
struct TravelingWaveFields {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> w;
};

/// Reconstructs v and w from a traveling-wave profile u through the exact
/// reduction identities
///   w = c u - u^2/2,   v = (1 + alpha (u - c)) u'
/// (u' spectral). For genuine traveling waves these are equivalent to the
/// linear constraints v = u' - alpha w', w = (1 + alpha) v'; the equivalent
/// per-wavenumber division v^(k) = i k u^(k) / (1 - alpha (1 + alpha) k^2)
/// is avoided because it is 0/0 at the resonant wavenumber.
TravelingWaveFields tw_auxiliaries(const PeriodicGrid& grid, const TravelingWaveParams& p,
                                   std::span<const double> u);

/// Discrete residuals (r1, r2) of the traveling-wave constraints,
///   r1 = ||v - (D u - alpha D w)||_M,   r2 = ||w - (1 + alpha) D v||_M,
/// with D = ops.d_central and the grid quadrature norm.
std::pair<double, double> tw_constraint_residual(const OperatorSet& ops,
                                                 const TravelingWaveParams& p,
                                                 std::span<const double> u,
                                                 std::span<const double> v,
                                                 std::span<const double> w);

struct PetviashviliOptions {
  double tol = 1e-12;          ///< on the sup-norm residual ||L u - N(u)||
  int max_iter = 10000;
  int divergence_window = 50;  ///< consecutive residual increases before aborting
};

/// Outcome of the fixed-point iteration; `profile` is the first iterate whose
/// residual passed the tolerance (or the last one computed).
struct PetviashviliResult {
  std::vector<double> profile;
  std::vector<double> residual_history;  ///< ||L u - N(u)||_inf per iterate
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
};

/// Petviashvili iteration for the solitary-wave profile of
///   -(1 + c tau)(1 - c^2 tau) u'' + c u = u^2/2 + c tau (1 + c tau) (u u')',
/// normalized to L u = N(u) with
///   L = -D^2 + c/((1+c tau)(1-c^2 tau)) Id,
///   N(u) = u^2 / (2 (1+c tau)(1-c^2 tau)) + c tau/(1-c^2 tau) (u u')'.
/// Update: L u_next = m^2 N(u) with the stabilizing factor
/// m = <L u, u>/<N(u), u>, L inverted per wavenumber. tau = 0 selects the
/// limit equation -u'' + c u = u^2/2 with exact solution
/// 3 c sech^2(sqrt(c) xi / 2).
///
/// Throws std::invalid_argument for singular parameters (c^2 tau = 1,
/// 1 + c tau = 0, or nonpositive linear coefficient c/((1+c tau)(1-c^2 tau)))
/// and std::runtime_error when the stabilizing factor becomes undefined
/// (<N(u), u> ~ 0) or the residual grows over `divergence_window` consecutive
/// iterations.
PetviashviliResult petviashvili_solve(const PeriodicGrid& grid, const TravelingWaveParams& p,
                                      std::span<const double> guess,
                                      const PetviashviliOptions& opts = {});

/// Closed-form solitary-wave profile 3 c sech^2(sqrt(c) xi / 2) of the limit
/// equation, sampled on the grid.
std::vector<double> limit_soliton_profile(const PeriodicGrid& grid, double c);

/// Eigenvalues {-1/tau, -1/sqrt(tau), +1/sqrt(tau)} of the convective flux
/// Jacobian at u = 0, computed from the assembled 3x3 matrix and returned in
/// ascending order. Throws std::runtime_error if the eigensolve produces a
/// non-real eigenvalue (it cannot for tau > 0).
std::array<double, 3> flux_jacobian_eigenvalues(double tau);

}  // namespace kdvh
