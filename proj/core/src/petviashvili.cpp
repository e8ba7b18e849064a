#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "dft.hpp"
#include "kdvh/traveling_wave.hpp"

namespace kdvh {

std::vector<double> limit_soliton_profile(const PeriodicGrid& grid, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("soliton speed must be positive");
  std::vector<double> u(grid.n);
  const double b = 0.5 * std::sqrt(c);
  for (int i = 0; i < grid.n; ++i) {
    const double e = std::exp(-std::abs(b * grid.nodes[i]));
    const double sech = 2.0 * e / (1.0 + e * e);
    u[i] = 3.0 * c * sech * sech;
  }
  return u;
}

PetviashviliResult petviashvili_solve(const PeriodicGrid& grid, const TravelingWaveParams& p,
                                      std::span<const double> guess,
                                      const PetviashviliOptions& opts) {
  const int n = grid.n;
  if (static_cast<int>(guess.size()) != n) {
    throw std::invalid_argument("guess length does not match the grid");
  }
  const double c = p.c;
  const double den1 = 1.0 + p.alpha();      // 1 + c tau
  const double den2 = 1.0 - c * c * p.tau;  // 1 - c^2 tau
  if (std::abs(den1) < 1e-12 || std::abs(den2) < 1e-12) {
    throw std::invalid_argument(
        "singular traveling-wave parameters (1 + c tau or 1 - c^2 tau vanishes)");
  }
  const double mu = c / (den1 * den2);
  if (!(mu > 0.0)) {
    throw std::invalid_argument(
        "nonpositive linear coefficient; the solitary-wave operator is not invertible");
  }
  const double coef_quad = 1.0 / (2.0 * den1 * den2);
  const double coef_conv = p.alpha() / den2;

  detail::Dft dft(n);
  const int ns = dft.spectrum_size();
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  std::vector<double> kappa_d(ns), lhat(ns);
  for (int j = 0; j < ns; ++j) {
    const double kappa = k0 * static_cast<double>(j);
    const bool nyquist = (n % 2 == 0) && j == n / 2;
    kappa_d[j] = nyquist ? 0.0 : kappa;
    lhat[j] = kappa * kappa + mu;
  }

  std::vector<double> u(guess.begin(), guess.end());
  std::vector<double> lu(n), du(n), nl(n), work(n);
  std::vector<std::complex<double>> uhat(ns), spec(ns);

  PetviashviliResult result;
  result.residual_history.reserve(static_cast<std::size_t>(std::max(opts.max_iter, 0)) + 1);

  double prev_res = std::numeric_limits<double>::infinity();
  int grow_count = 0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    dft.forward(u, uhat);
    for (int j = 0; j < ns; ++j) spec[j] = lhat[j] * uhat[j];
    dft.backward(spec, lu);
    for (int j = 0; j < ns; ++j) spec[j] = std::complex<double>(0.0, kappa_d[j]) * uhat[j];
    dft.backward(spec, du);
    for (int i = 0; i < n; ++i) work[i] = u[i] * du[i];
    dft.forward(work, spec);
    for (int j = 0; j < ns; ++j) spec[j] *= std::complex<double>(0.0, kappa_d[j]);
    dft.backward(spec, nl);
    for (int i = 0; i < n; ++i) nl[i] = coef_quad * u[i] * u[i] + coef_conv * nl[i];

    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(lu[i] - nl[i]));
    result.residual_history.push_back(res);
    result.iterations = it;
    result.final_residual = res;
    if (res <= opts.tol) {
      result.converged = true;
      break;
    }
    if (it == opts.max_iter) break;
    if (res > prev_res) {
      if (++grow_count >= opts.divergence_window) {
        throw std::runtime_error("solitary-wave iteration diverging (residual grew over " +
                                 std::to_string(opts.divergence_window) +
                                 " consecutive iterations)");
      }
    } else {
      grow_count = 0;
    }
    prev_res = res;

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += lu[i] * u[i];
      den += nl[i] * u[i];
    }
    if (!std::isfinite(den) || std::abs(den) < 1e-300) {
      throw std::runtime_error("stabilizing factor undefined (<N(u), u> vanished)");
    }
    const double m = num / den;
    if (!std::isfinite(m)) {
      throw std::runtime_error("stabilizing factor overflowed");
    }
    dft.forward(nl, spec);
    for (int j = 0; j < ns; ++j) spec[j] *= m * m / lhat[j];
    dft.backward(spec, u);
  }
  result.profile = std::move(u);
  return result;
}

}  // namespace kdvh
