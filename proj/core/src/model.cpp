#include "kdvh/model.hpp"

#include <cmath>
#include <stdexcept>

namespace kdvh {

std::vector<double> pack(const KdvhState& s) {
  const std::size_t n = s.u.size();
  std::vector<double> q(3 * n);
  std::copy(s.u.begin(), s.u.end(), q.begin());
  std::copy(s.v.begin(), s.v.end(), q.begin() + static_cast<std::ptrdiff_t>(n));
  std::copy(s.w.begin(), s.w.end(), q.begin() + static_cast<std::ptrdiff_t>(2 * n));
  return q;
}

void unpack(std::span<const double> q, KdvhState& s) {
  const std::size_t n = q.size() / 3;
  s.u.assign(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n));
  s.v.assign(q.begin() + static_cast<std::ptrdiff_t>(n), q.begin() + static_cast<std::ptrdiff_t>(2 * n));
  s.w.assign(q.begin() + static_cast<std::ptrdiff_t>(2 * n), q.end());
}

double soliton_value(double c, double x, double t) {
  const double arg = 0.5 * std::sqrt(c) * (x - c * t);
  const double s = 1.0 / std::cosh(arg);
  return 3.0 * c * s * s;
}

std::vector<double> soliton_profile(double c, std::span<const double> x, double t) {
  if (!(c > 0)) throw std::invalid_argument("soliton_profile: wave speed must be positive");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = soliton_value(c, x[i], t);
  return out;
}

KdvhState well_prepared_state(const OperatorSet& ops, std::span<const double> u0, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("well_prepared_state: tau must be positive");
  if (static_cast<int>(u0.size()) != ops.grid.n) {
    throw std::invalid_argument("well_prepared_state: u0 does not match grid size");
  }
  KdvhState s;
  s.tau = tau;
  s.u.assign(u0.begin(), u0.end());
  s.v.resize(u0.size());
  s.w.resize(u0.size());
  ops.d_minus.apply(s.u, s.v);
  ops.d_central.apply(s.v, s.w);
  return s;
}

void kdvh_split_f(const OperatorSet& ops, std::span<const double> q, std::span<double> f) {
  const std::size_t n = q.size() / 3;
  auto u = q.first(n);
  std::vector<double> u2(n), du2(n), du(n);
  for (std::size_t i = 0; i < n; ++i) u2[i] = u[i] * u[i];
  ops.d_central.apply(u2, du2);
  ops.d_central.apply(u, du);
  for (std::size_t i = 0; i < n; ++i) f[i] = -(du2[i] + u[i] * du[i]) / 3.0;
  std::fill(f.begin() + static_cast<std::ptrdiff_t>(n), f.end(), 0.0);
}

void kdvh_split_g(const OperatorSet& ops, double tau, std::span<const double> q, std::span<double> g) {
  const std::size_t n = q.size() / 3;
  auto u = q.first(n);
  auto v = q.subspan(n, n);
  auto w = q.subspan(2 * n, n);
  std::vector<double> tmp(n);

  ops.d_plus.apply(w, tmp); // g_u = -D+ w
  for (std::size_t i = 0; i < n; ++i) g[i] = -tmp[i];

  ops.d_central.apply(v, tmp); // g_v = (D v - w)/tau
  for (std::size_t i = 0; i < n; ++i) g[n + i] = (tmp[i] - w[i]) / tau;

  ops.d_minus.apply(u, tmp); // g_w = (-D- u + v)/tau
  for (std::size_t i = 0; i < n; ++i) g[2 * n + i] = (-tmp[i] + v[i]) / tau;
}

std::vector<MatrixEntry> stiff_operator_triplets(const OperatorSet& ops, double tau) {
  const int n = ops.grid.n;
  std::vector<MatrixEntry> out;
  auto add_block = [&](const CirculantOperator& op, int row0, int col0, double scale) {
    for (const auto& e : op.triplets()) out.push_back({row0 + e.row, col0 + e.col, scale * e.value});
  };
  add_block(ops.d_plus, 0, 2 * n, -1.0);
  add_block(ops.d_central, n, n, 1.0 / tau);
  for (int i = 0; i < n; ++i) out.push_back({n + i, 2 * n + i, -1.0 / tau});
  add_block(ops.d_minus, 2 * n, 0, -1.0 / tau);
  for (int i = 0; i < n; ++i) out.push_back({2 * n + i, n + i, 1.0 / tau});
  return out;
}

void kdv_split_f(const OperatorSet& ops, std::span<const double> eta, std::span<double> f) {
  const std::size_t n = eta.size();
  std::vector<double> e2(n), de2(n), de(n);
  for (std::size_t i = 0; i < n; ++i) e2[i] = eta[i] * eta[i];
  ops.d_central.apply(e2, de2);
  ops.d_central.apply(eta, de);
  for (std::size_t i = 0; i < n; ++i) f[i] = -(de2[i] + eta[i] * de[i]) / 3.0;
}

void kdv_split_g(const OperatorSet& ops, std::span<const double> eta, std::span<double> g) {
  ops.d3.apply(eta, g);
  for (auto& x : g) x = -x;
}

std::vector<double> kdv_rhs(const OperatorSet& ops, std::span<const double> eta) {
  std::vector<double> f(eta.size()), g(eta.size());
  kdv_split_f(ops, eta, f);
  kdv_split_g(ops, eta, g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] += g[i];
  return f;
}

double mass(const OperatorSet& ops, std::span<const double> u) {
  double s = 0;
  for (double x : u) s += x;
  return ops.grid.dx * s;
}

double energy_kdv(const OperatorSet& ops, std::span<const double> eta) {
  return 0.5 * dot_m(ops, eta, eta);
}

double energy_kdvh(const OperatorSet& ops, const KdvhState& s) {
  return 0.5 * (dot_m(ops, s.u, s.u) + s.tau * dot_m(ops, s.v, s.v) + s.tau * dot_m(ops, s.w, s.w));
}

} // namespace kdvh
