#include "kdvh/traveling_wave.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dft.hpp"

namespace kdvh {

namespace {

constexpr double kSingularRel = 1e-10;

double hypot2(double a, double b) { return std::hypot(a, b); }

/// Quartic potential factor P(u) with H = v^2/2 - u^2 P(u)/(1 + c tau).
double potential_factor(const TravelingWaveParams& p, double u) {
  const double ct = p.c * p.tau;
  const double c2t = p.c * p.c * p.tau;
  return -ct / 8.0 * u * u + (3.0 * c2t - 1.0) / 6.0 * u + p.c * (1.0 - c2t) / 2.0;
}

/// Non-throwing field evaluation; returns false within the singular-line
/// proximity threshold.
bool field_raw(const TravelingWaveParams& p, const PhasePoint& pt, PhasePoint& out) {
  const double den = singular_denominator(p, pt.u_tilde);
  if (std::abs(den) <= kSingularRel * std::max(1.0, std::abs(p.alpha()))) return false;
  out.u_tilde = pt.v_tilde / den;
  out.v_tilde = (p.c - pt.u_tilde / 2.0) * pt.u_tilde / (1.0 + p.alpha());
  return true;
}

/// Exact 2x2 Jacobian of the field at the equilibrium (u0, 0):
///   [[0, 1/(1 + c tau (u0 - c))], [(c - u0)/(1 + c tau), 0]].
Eigen::Matrix2d equilibrium_jacobian(const TravelingWaveParams& p, double u0) {
  const double den = singular_denominator(p, u0);
  if (std::abs(den) <= kSingularRel * std::max(1.0, std::abs(p.alpha()))) {
    throw std::domain_error("equilibrium lies on the singular line (c^2 tau too close to 1)");
  }
  Eigen::Matrix2d j;
  j << 0.0, 1.0 / den, (p.c - u0) / (1.0 + p.alpha()), 0.0;
  return j;
}

std::array<std::complex<double>, 2> matrix_eigenvalues(const Eigen::Matrix2d& j) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(j, /*computeEigenvectors=*/false);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

struct SweepOutcome {
  OrbitResult result;
  bool drift_failed = false;
  PhasePoint fail_point{};
};

void store_sample(OrbitResult& res, std::size_t cap, std::size_t& stride,
                  std::size_t& since_last, double xi, const PhasePoint& pt) {
  if (++since_last < stride) return;
  since_last = 0;
  if (res.samples.size() >= cap) {
    // Thin in place: keep every second sample and double the stride.
    std::size_t keep = 0;
    for (std::size_t i = 0; i < res.samples.size(); i += 2) res.samples[keep++] = res.samples[i];
    res.samples.resize(keep);
    stride *= 2;
  }
  res.samples.push_back({xi, pt.u_tilde, pt.v_tilde});
}

/// One fixed-step RK4 sweep. Fails (for restart with a smaller step) when the
/// first-integral drift exceeds the tolerance; otherwise runs until a
/// terminal event or the budget ends.
SweepOutcome sweep(const TravelingWaveParams& p, const PhasePoint& start, double h,
                   const OrbitConfig& cfg) {
  SweepOutcome out;
  OrbitResult& res = out.result;
  res.step_used = h;
  res.max_u_tilde = start.u_tilde;
  res.last = start;

  std::size_t stride = 1;
  std::size_t since_last = stride;  // forces the first store
  store_sample(res, cfg.max_stored_samples, stride, since_last, 0.0, start);

  PhasePoint f0;
  if (!field_raw(p, start, f0)) {
    res.classification = OrbitClass::singular_hit;
    return out;
  }
  const double f0n = hypot2(f0.u_tilde, f0.v_tilde);
  if (f0n < 1e-300) return out;  // started at an equilibrium; nothing to integrate
  const double f0u = f0.u_tilde / f0n;
  const double f0v = f0.v_tilde / f0n;

  const double h0 = first_integral(p, start);
  const double launch_dist = hypot2(start.u_tilde, start.v_tilde);
  const double scale_c = std::max(1.0, 2.0 * std::abs(p.c));
  const double r_exit = std::max(50.0 * launch_dist, 0.05 * scale_c);
  const double arm_dist = std::max(10.0 * h * f0n, 1e-12);

  PhasePoint pt = start;
  double amp = launch_dist;
  double s_prev = 0.0;
  bool armed = false;
  bool away = false;
  const long long max_steps = std::max<long long>(1, std::min<long long>(
      cfg.max_steps, static_cast<long long>(cfg.max_xi / h) + 1));

  for (long long step = 1; step <= max_steps; ++step) {
    PhasePoint k1, k2, k3, k4;
    bool ok = field_raw(p, pt, k1);
    PhasePoint q{pt.u_tilde + 0.5 * h * k1.u_tilde, pt.v_tilde + 0.5 * h * k1.v_tilde};
    ok = ok && field_raw(p, q, k2);
    q = {pt.u_tilde + 0.5 * h * k2.u_tilde, pt.v_tilde + 0.5 * h * k2.v_tilde};
    ok = ok && field_raw(p, q, k3);
    q = {pt.u_tilde + h * k3.u_tilde, pt.v_tilde + h * k3.v_tilde};
    ok = ok && field_raw(p, q, k4);
    if (!ok) {
      res.classification = OrbitClass::singular_hit;
      res.last = pt;
      return out;
    }

    const double xi = static_cast<double>(step) * h;
    pt.u_tilde += h / 6.0 * (k1.u_tilde + 2.0 * k2.u_tilde + 2.0 * k3.u_tilde + k4.u_tilde);
    pt.v_tilde += h / 6.0 * (k1.v_tilde + 2.0 * k2.v_tilde + 2.0 * k3.v_tilde + k4.v_tilde);
    res.last = pt;
    res.xi_end = xi;

    const double dist = hypot2(pt.u_tilde, pt.v_tilde);
    if (!std::isfinite(dist) || dist > cfg.escape_radius) {
      store_sample(res, cfg.max_stored_samples, stride, since_last, xi, pt);
      res.classification = OrbitClass::escaped;
      return out;
    }

    const double drift = std::abs(first_integral(p, pt) - h0);
    res.h_drift = std::max(res.h_drift, drift);
    if (drift > cfg.h_drift_tol) {
      out.drift_failed = true;
      out.fail_point = pt;
      return out;
    }

    amp = std::max(amp, dist);
    res.max_u_tilde = std::max(res.max_u_tilde, pt.u_tilde);
    store_sample(res, cfg.max_stored_samples, stride, since_last, xi, pt);

    if (!away && dist >= r_exit) away = true;
    if (away && dist <= cfg.saddle_return_radius * std::max(1.0, amp)) {
      res.classification = OrbitClass::homoclinic;
      return out;
    }

    const double su = pt.u_tilde - start.u_tilde;
    const double sv = pt.v_tilde - start.v_tilde;
    const double s_new = su * f0u + sv * f0v;
    if (!armed && s_new < -arm_dist) armed = true;
    if (armed && s_prev < 0.0 && s_new >= 0.0) {
      PhasePoint f_here;
      const double speed = field_raw(p, pt, f_here) ? hypot2(f_here.u_tilde, f_here.v_tilde) : f0n;
      const double closure = std::max(cfg.closure_radius * std::max(1.0, amp), 50.0 * h * speed);
      if (hypot2(su, sv) <= closure) {
        res.classification = OrbitClass::periodic;
        return out;
      }
    }
    s_prev = s_new;
  }
  return out;  // budget exhausted, classification stays undetermined
}

}  // namespace

double singular_denominator(const TravelingWaveParams& p, double u_tilde) {
  return 1.0 + p.alpha() * (u_tilde - p.c);
}

bool near_singular_line(const TravelingWaveParams& p, double u_tilde) {
  return std::abs(singular_denominator(p, u_tilde)) <=
         kSingularRel * std::max(1.0, std::abs(p.alpha()));
}

PhasePoint tw_vector_field(const TravelingWaveParams& p, const PhasePoint& pt) {
  PhasePoint out;
  if (!field_raw(p, pt, out)) {
    throw std::domain_error("phase point within the singular-line proximity threshold");
  }
  return out;
}

double first_integral(const TravelingWaveParams& p, const PhasePoint& pt) {
  const double u = pt.u_tilde;
  return 0.5 * pt.v_tilde * pt.v_tilde -
         u * u / (1.0 + p.alpha()) * potential_factor(p, u);
}

EquilibriumReport classify_equilibria(const TravelingWaveParams& p) {
  EquilibriumReport rep;
  rep.origin_eigenvalues = matrix_eigenvalues(equilibrium_jacobian(p, 0.0));
  rep.secondary_eigenvalues = matrix_eigenvalues(equilibrium_jacobian(p, 2.0 * p.c));

  const auto scale = [](const std::array<std::complex<double>, 2>& ev) {
    return std::max({std::abs(ev[0]), std::abs(ev[1]), 1e-300});
  };
  const double s0 = scale(rep.origin_eigenvalues);
  rep.origin_is_saddle = std::abs(rep.origin_eigenvalues[0].imag()) <= 1e-10 * s0 &&
                         std::abs(rep.origin_eigenvalues[1].imag()) <= 1e-10 * s0 &&
                         rep.origin_eigenvalues[0].real() * rep.origin_eigenvalues[1].real() < 0.0;
  const double s1 = scale(rep.secondary_eigenvalues);
  rep.secondary_is_center =
      std::abs(rep.secondary_eigenvalues[0].real()) <= 1e-10 * s1 &&
      std::abs(rep.secondary_eigenvalues[1].real()) <= 1e-10 * s1 &&
      std::abs(rep.secondary_eigenvalues[0].imag()) > 0.0;
  return rep;
}

std::array<PhasePoint, 2> homoclinic_launch_points(const TravelingWaveParams& p, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("launch offset must be positive");
  const Eigen::Matrix2d j = equilibrium_jacobian(p, 0.0);
  Eigen::EigenSolver<Eigen::Matrix2d> es(j);
  const auto& vals = es.eigenvalues();
  if (std::abs(vals(0).imag()) > 1e-10 * std::abs(vals(0)) || vals(0).real() * vals(1).real() >= 0.0) {
    throw std::domain_error("origin is not a saddle; no unstable direction to launch from");
  }
  const int unstable = vals(0).real() > vals(1).real() ? 0 : 1;
  Eigen::Vector2d dir = es.eigenvectors().col(unstable).real();
  dir.normalize();
  if (dir(0) < 0.0) dir = -dir;
  return {PhasePoint{eps * dir(0), eps * dir(1)}, PhasePoint{-eps * dir(0), -eps * dir(1)}};
}

const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::homoclinic: return "homoclinic";
    case OrbitClass::periodic: return "periodic";
    case OrbitClass::singular_hit: return "singular_hit";
    case OrbitClass::escaped: return "escaped";
    case OrbitClass::undetermined: return "undetermined";
  }
  return "unknown";
}

OrbitResult integrate_orbit(const TravelingWaveParams& p, const PhasePoint& start,
                            const OrbitConfig& config) {
  if (!(config.initial_step > 0.0) || !(config.max_xi > 0.0)) {
    throw std::invalid_argument("orbit step and length budget must be positive");
  }
  if (near_singular_line(p, start.u_tilde)) {
    throw std::domain_error("orbit start lies on the singular line");
  }
  double h = config.initial_step;
  SweepOutcome out;
  for (int attempt = 0; attempt <= config.max_halvings; ++attempt) {
    out = sweep(p, start, h, config);
    if (!out.drift_failed) return out.result;
    h /= 2.0;
  }
  // The drift tolerance was unreachable within the halving budget. Near the
  // singular line that is structural (the field blows up), so report the hit
  // and rescore the drift over the stored samples, which all predate the
  // violating terminal step; otherwise leave the orbit undetermined with the
  // achieved drift.
  if (std::abs(singular_denominator(p, out.fail_point.u_tilde)) <
      1e-3 * std::max(1.0, std::abs(p.alpha()))) {
    out.result.classification = OrbitClass::singular_hit;
    const double h0 = first_integral(p, start);
    double drift = 0.0;
    for (const OrbitSample& s : out.result.samples) {
      drift = std::max(drift, std::abs(first_integral(p, {s.u_tilde, s.v_tilde}) - h0));
    }
    out.result.h_drift = drift;
  }
  return out.result;
}

TravelingWaveFields tw_auxiliaries(const PeriodicGrid& grid, const TravelingWaveParams& p,
                                   std::span<const double> u) {
  const int n = grid.n;
  if (static_cast<int>(u.size()) != n) {
    throw std::invalid_argument("profile length does not match the grid");
  }
  detail::Dft dft(n);
  std::vector<std::complex<double>> spec(dft.spectrum_size());
  dft.forward(u, spec);
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  for (int j = 0; j < dft.spectrum_size(); ++j) {
    const bool nyquist = (n % 2 == 0) && j == n / 2;
    const double kappa = nyquist ? 0.0 : k0 * static_cast<double>(j);
    spec[j] *= std::complex<double>(0.0, kappa);
  }
  TravelingWaveFields out;
  out.u.assign(u.begin(), u.end());
  out.v.resize(n);
  dft.backward(spec, out.v);  // out.v = spectral derivative u'
  out.w.resize(n);
  const double a = p.alpha();
  for (int i = 0; i < n; ++i) {
    out.v[i] *= 1.0 + a * (u[i] - p.c);
    out.w[i] = p.c * u[i] - 0.5 * u[i] * u[i];
  }
  return out;
}

std::pair<double, double> tw_constraint_residual(const OperatorSet& ops,
                                                 const TravelingWaveParams& p,
                                                 std::span<const double> u,
                                                 std::span<const double> v,
                                                 std::span<const double> w) {
  const int n = ops.grid.n;
  if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n ||
      static_cast<int>(w.size()) != n) {
    throw std::invalid_argument("profile lengths do not match the grid");
  }
  const double a = p.alpha();
  std::vector<double> du(n), dv(n), dw(n), r(n);
  ops.d_central.apply(u, du);
  ops.d_central.apply(v, dv);
  ops.d_central.apply(w, dw);
  for (int i = 0; i < n; ++i) r[i] = v[i] - (du[i] - a * dw[i]);
  const double r1 = norm_m(ops, r);
  for (int i = 0; i < n; ++i) r[i] = w[i] - (1.0 + a) * dv[i];
  const double r2 = norm_m(ops, r);
  return {r1, r2};
}

std::array<double, 3> flux_jacobian_eigenvalues(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  // Convective flux F(q) = (u^2/2 + w, -v/tau, u/tau); Jacobian at u = 0.
  Eigen::Matrix3d j;
  j << 0.0, 0.0, 1.0,
       0.0, -1.0 / tau, 0.0,
       1.0 / tau, 0.0, 0.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(j, /*computeEigenvectors=*/false);
  std::array<double, 3> out{};
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(es.eigenvalues()(i)));
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-10 * std::max(1.0, scale)) {
      throw std::runtime_error("flux Jacobian eigenvalue unexpectedly complex");
    }
    out[static_cast<std::size_t>(i)] = ev.real();
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kdvh
