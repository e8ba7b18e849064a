#pragma once

#include <span>
#include <vector>

#include "kdvh/operators.hpp"

namespace kdvh {

/// State of the hyperbolized system. u approximates the KdV solution,
/// v and w approximate its first and second spatial derivatives; the
/// relaxation parameter tau controls how fast (v, w) chase (u_x, u_xx).
struct KdvhState {
  double tau = 1.0;
  std::vector<double> u, v, w;

  int n() const { return static_cast<int>(u.size()); }
};

/// Flat [u | v | w] layout used by the time steppers and linear solvers.
std::vector<double> pack(const KdvhState& s);
void unpack(std::span<const double> q, KdvhState& s);

/// Solitary-wave solution of KdV with speed c > 0 and amplitude 3c:
/// eta(x, t) = 3 c sech^2(sqrt(c) (x - c t) / 2).
double soliton_value(double c, double x, double t);
std::vector<double> soliton_profile(double c, std::span<const double> x, double t = 0.0);

/// Initial data whose auxiliary variables sit on the limit manifold:
/// v = D- u0, w = D D- u0.
KdvhState well_prepared_state(const OperatorSet& ops, std::span<const double> u0, double tau);

/// Convection part of the split semidiscretization (explicit):
///   f_u = -(D u^2 + u .* D u) / 3, f_v = f_w = 0.
/// q and f use the flat 3n layout.
void kdvh_split_f(const OperatorSet& ops, std::span<const double> q, std::span<double> f);

/// Stiff linear part (implicit):
///   g_u = -D+ w, g_v = (D v - w)/tau, g_w = (-D- u + v)/tau.
void kdvh_split_g(const OperatorSet& ops, double tau, std::span<const double> q, std::span<double> g);

/// Entries of the stiff operator G with kdvh_split_g(q) = G q, as sparse
/// triplets over the 3n flat layout (finite-difference families only).
struct MatrixEntry {
  int row, col;
  double value;
};
std::vector<MatrixEntry> stiff_operator_triplets(const OperatorSet& ops, double tau);

/// KdV semidiscretization, split for ImEx use: explicit convection
///   f = -(D eta^2 + eta .* D eta) / 3
/// and linear dispersion
///   g = -D+ D D- eta.
void kdv_split_f(const OperatorSet& ops, std::span<const double> eta, std::span<double> f);
void kdv_split_g(const OperatorSet& ops, std::span<const double> eta, std::span<double> g);
/// Full right-hand side f + g.
std::vector<double> kdv_rhs(const OperatorSet& ops, std::span<const double> eta);

/// Discrete invariants.
double mass(const OperatorSet& ops, std::span<const double> u);
double energy_kdv(const OperatorSet& ops, std::span<const double> eta); // 0.5 eta^T M eta
double energy_kdvh(const OperatorSet& ops, const KdvhState& s);         // 0.5 (u^T M u + tau v^T M v + tau w^T M w)

} // namespace kdvh
