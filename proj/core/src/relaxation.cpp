#include "kdvh/relaxation.hpp"

#include <stdexcept>

namespace kdvh {

namespace {

/// Shared core: gamma from the weighted inner products <q_old, d> and
/// <d, d>, then q_new <- q_old + gamma d. The weight of entry i is
/// dx * block_weight(i).
template <class WeightFn>
RelaxationResult relax_with_weights(double dx, std::span<const double> q_old,
                                    std::span<double> q_new, WeightFn&& weight) {
  if (q_old.size() != q_new.size())
    throw std::invalid_argument("relaxation: state sizes disagree");
  double qd = 0.0, dd = 0.0;
  for (std::size_t i = 0; i < q_old.size(); ++i) {
    const double w = weight(i);
    const double d = q_new[i] - q_old[i];
    qd += w * q_old[i] * d;
    dd += w * d * d;
  }
  qd *= dx;
  dd *= dx;

  RelaxationResult res;
  if (dd < 1e-28) {
    res.degenerate = true;
    res.gamma = 1.0;
    return res;
  }
  res.gamma = -2.0 * qd / dd;
  res.out_of_range = res.gamma < 0.5 || res.gamma > 1.5;
  for (std::size_t i = 0; i < q_old.size(); ++i)
    q_new[i] = q_old[i] + res.gamma * (q_new[i] - q_old[i]);
  return res;
}

}  // namespace

RelaxationResult relax_energy(const OperatorSet& ops, double tau, std::span<const double> q_old,
                              std::span<double> q_new) {
  const std::size_t n = static_cast<std::size_t>(ops.grid.n);
  if (q_old.size() != 3 * n) throw std::invalid_argument("relaxation: expected flat [u|v|w] state");
  return relax_with_weights(ops.norm_weight(), q_old, q_new,
                            [n, tau](std::size_t i) { return i < n ? 1.0 : tau; });
}

RelaxationResult relax_energy_kdv(const OperatorSet& ops, std::span<const double> eta_old,
                                  std::span<double> eta_new) {
  if (eta_old.size() != static_cast<std::size_t>(ops.grid.n))
    throw std::invalid_argument("relaxation: state does not match grid");
  return relax_with_weights(ops.norm_weight(), eta_old, eta_new,
                            [](std::size_t) { return 1.0; });
}

}  // namespace kdvh
