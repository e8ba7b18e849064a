#pragma once

#include <span>

#include "kdvh/operators.hpp"

namespace kdvh {

/// Outcome of projecting one step back onto the energy level set along the
/// update direction.
struct RelaxationResult {
  double gamma = 1.0;
  bool degenerate = false;    // update direction vanished; gamma forced to 1
  bool out_of_range = false;  // gamma outside [0.5, 1.5], step likely too large
};

/// Replaces q_new by q_old + gamma (q_new - q_old) with the unique nonzero
/// root of E(q_old + gamma d) = E(q_old) for the quadratic energy
/// E(q) = 1/2 (u^T M u + tau v^T M v + tau w^T M w):
///   gamma = -2 <q_old, d> / <d, d>
/// in the same weighted inner product. States use the flat [u|v|w] layout.
/// The relaxed step advances time by gamma * dt.
RelaxationResult relax_energy(const OperatorSet& ops, double tau, std::span<const double> q_old,
                              std::span<double> q_new);

/// Same projection for the limit equation's energy 1/2 eta^T M eta.
RelaxationResult relax_energy_kdv(const OperatorSet& ops, std::span<const double> eta_old,
                                  std::span<double> eta_new);

}  // namespace kdvh
