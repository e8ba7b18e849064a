#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kdvh/grid.hpp"
#include "kdvh/model.hpp"
#include "kdvh/operators.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace kdvh;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

KdvhState random_state(std::size_t n, double tau, unsigned seed) {
  KdvhState s;
  s.tau = tau;
  s.u = random_vector(n, seed);
  s.v = random_vector(n, seed + 1);
  s.w = random_vector(n, seed + 2);
  return s;
}

}  // namespace

TEST_CASE("solitary-wave profile has the textbook amplitude and decay") {
  const double c = 0.25;
  CHECK(soliton_value(c, 0.0, 0.0) == doctest::Approx(3.0 * c).epsilon(1e-15));
  // Symmetric about the crest, travels with speed c.
  CHECK(soliton_value(c, 1.3, 0.0) == doctest::Approx(soliton_value(c, -1.3, 0.0)).epsilon(1e-14));
  CHECK(soliton_value(c, c * 2.0 + 0.7, 2.0) == doctest::Approx(soliton_value(c, 0.7, 0.0)).epsilon(1e-14));
  // sech^2 value at a hand-computed point: 3c sech^2(sqrt(c) x / 2) at x = 2, c = 1.
  const double expected = 3.0 / std::pow(std::cosh(1.0), 2);
  CHECK(soliton_value(1.0, 2.0, 0.0) == doctest::Approx(expected).epsilon(1e-14));
  // No overflow far in the tails.
  CHECK(soliton_value(1.0, 1.0e4, 0.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(soliton_value(1.0, -1.0e4, 0.0)));
}

TEST_CASE("profile helper evaluates pointwise values on a grid") {
  PeriodicGrid grid = make_grid(-10.0, 10.0, 64);
  std::vector<double> eta = soliton_profile(1.0 / 3.0, grid.nodes, 0.5);
  REQUIRE(eta.size() == grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    CHECK(eta[i] == doctest::Approx(soliton_value(1.0 / 3.0, grid.nodes[i], 0.5)).epsilon(1e-15));
}

TEST_CASE("split right-hand sides match frozen reference values") {
  // Second-order operators on 8 nodes with dx = 1/4; the expected vectors
  // were computed independently with exact rational arithmetic.
  PeriodicGrid grid = make_grid(0.0, 2.0, 8);
  OperatorSet ops = make_upwind_operators(grid, 2);
  const std::vector<double> eta = {3.0 / 8.0, -1.0 / 8.0, 4.0 / 8.0, 1.0 / 8.0,
                                   -5.0 / 8.0, 9.0 / 8.0, 2.0 / 8.0, -6.0 / 8.0};

  const std::vector<double> f_ref = {
      0.5104166666666666, -0.34375, -0.25, 0.46875,
      -0.84375, -1.0208333333333333, 1.5625, -0.08333333333333333};
  const std::vector<double> g_ref = {68.0, -359.0, 678.0, -950.0, 452.0, 679.0, -1198.0, 630.0};

  std::vector<double> f(8), g(8);
  kdv_split_f(ops, eta, f);
  kdv_split_g(ops, eta, g);
  std::vector<double> rhs = kdv_rhs(ops, eta);

  for (int i = 0; i < 8; ++i) {
    CHECK(f[i] == doctest::Approx(f_ref[i]).epsilon(1e-13));
    CHECK(g[i] == doctest::Approx(g_ref[i]).epsilon(1e-13));
    CHECK(rhs[i] == doctest::Approx(f_ref[i] + g_ref[i]).epsilon(1e-13));
  }
}

TEST_CASE("pack and unpack are inverse bijections on the flat layout") {
  KdvhState s = random_state(17, 0.3, 42);
  std::vector<double> q = pack(s);
  REQUIRE(q.size() == 3 * 17);
  for (int i = 0; i < 17; ++i) {
    CHECK(q[i] == s.u[i]);
    CHECK(q[17 + i] == s.v[i]);
    CHECK(q[34 + i] == s.w[i]);
  }
  KdvhState t;
  t.tau = s.tau;
  unpack(q, t);
  for (int i = 0; i < 17; ++i) {
    CHECK(t.u[i] == s.u[i]);
    CHECK(t.v[i] == s.v[i]);
    CHECK(t.w[i] == s.w[i]);
  }
}

TEST_CASE("well-prepared initial data satisfies the limit relations exactly") {
  PeriodicGrid grid = make_grid(-20.0, 20.0, 128);
  OperatorSet ops = make_upwind_operators(grid, 6);
  std::vector<double> u0 = soliton_profile(1.0 / 3.0, grid.nodes);
  KdvhState s = well_prepared_state(ops, u0, 1e-3);
  CHECK(s.tau == 1e-3);
  std::vector<double> v_ref = ops.d_minus(u0);
  std::vector<double> w_ref = ops.d_central(v_ref);
  for (std::size_t i = 0; i < grid.n; ++i) {
    CHECK(s.u[i] == u0[i]);
    CHECK(s.v[i] == v_ref[i]);
    CHECK(s.w[i] == w_ref[i]);
  }
}

TEST_CASE("stiff split evaluates the documented componentwise formulas") {
  PeriodicGrid grid = make_grid(0.0, 1.0, 24);
  OperatorSet ops = make_upwind_operators(grid, 3);
  const double tau = 0.37;
  KdvhState s = random_state(grid.n, tau, 7);
  std::vector<double> q = pack(s);
  std::vector<double> g(3 * grid.n);
  kdvh_split_g(ops, tau, q, g);

  std::vector<double> dpw = ops.d_plus(s.w);
  std::vector<double> dv = ops.d_central(s.v);
  std::vector<double> dmu = ops.d_minus(s.u);
  for (std::size_t i = 0; i < grid.n; ++i) {
    CHECK(g[i] == doctest::Approx(-dpw[i]).epsilon(1e-14));
    CHECK(g[grid.n + i] == doctest::Approx((dv[i] - s.w[i]) / tau).epsilon(1e-14));
    CHECK(g[2 * grid.n + i] == doctest::Approx((-dmu[i] + s.v[i]) / tau).epsilon(1e-14));
  }
}

TEST_CASE("sparse stiff operator agrees with the matrix-free evaluation") {
  PeriodicGrid grid = make_grid(-1.0, 2.0, 24);
  for (int order : {1, 3, 4, 8}) {
    CAPTURE(order);
    OperatorSet ops = make_upwind_operators(grid, order);
    const double tau = 0.05;
    KdvhState s = random_state(grid.n, tau, 100 + order);
    std::vector<double> q = pack(s);

    std::vector<double> g_free(3 * grid.n);
    kdvh_split_g(ops, tau, q, g_free);

    std::vector<double> g_mat(3 * grid.n, 0.0);
    for (const MatrixEntry& e : stiff_operator_triplets(ops, tau))
      g_mat[e.row] += e.value * q[e.col];

    double scale = 0.0;
    for (double x : g_free) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < 3 * grid.n; ++i)
      CHECK(std::abs(g_mat[i] - g_free[i]) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("convection split conserves mass and energy semidiscretely") {
  PeriodicGrid grid = make_grid(-5.0, 5.0, 64);
  std::vector<int> orders = {2, 5, 8};
  for (int order : orders) {
    CAPTURE(order);
    OperatorSet ops = make_upwind_operators(grid, order);
    KdvhState s = random_state(grid.n, 0.2, 500 + order);
    std::vector<double> q = pack(s);
    std::vector<double> f(3 * grid.n);
    kdvh_split_f(ops, q, f);

    // Mass production: sum of M f_u.
    double dmass = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) dmass += grid.dx * f[i];
    CHECK(std::abs(dmass) < 1e-11);

    // Energy production: u^T M f_u (v and w components of f vanish).
    double denergy = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) denergy += grid.dx * s.u[i] * f[i];
    CHECK(std::abs(denergy) < 1e-11);

    // The auxiliary components of the convection split are exactly zero.
    for (std::size_t i = grid.n; i < 3 * grid.n; ++i) CHECK(f[i] == 0.0);
  }
}

TEST_CASE("stiff split conserves the weighted energy semidiscretely") {
  PeriodicGrid grid = make_grid(-5.0, 5.0, 64);
  for (double tau : {1.0, 1e-2, 1e-4}) {
    CAPTURE(tau);
    OperatorSet ops = make_upwind_operators(grid, 6);
    KdvhState s = random_state(grid.n, tau, 900);
    std::vector<double> q = pack(s);
    std::vector<double> g(3 * grid.n);
    kdvh_split_g(ops, tau, q, g);

    // d/dt [well-balanced energy] = u^T M g_u + tau v^T M g_v + tau w^T M g_w.
    double prod = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      prod += grid.dx * (s.u[i] * g[i] + tau * s.v[i] * g[grid.n + i] + tau * s.w[i] * g[2 * grid.n + i]);
      scale += grid.dx * (std::abs(s.u[i] * g[i]) + tau * std::abs(s.v[i] * g[grid.n + i]) +
                          tau * std::abs(s.w[i] * g[2 * grid.n + i]));
    }
    CHECK(std::abs(prod) <= 1e-11 * std::max(1.0, scale));
  }
}

TEST_CASE("dispersion split of the limit model conserves the quadratic energy") {
  PeriodicGrid grid = make_grid(-5.0, 5.0, 64);
  OperatorSet ops = make_upwind_operators(grid, 4);
  std::vector<double> eta = random_vector(grid.n, 31);
  std::vector<double> g(grid.n);
  kdv_split_g(ops, eta, g);
  double prod = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) prod += grid.dx * eta[i] * g[i];
  // eta^T M Dp D Dm eta = -(Dm eta)^T M D (Dm eta) = 0 by antisymmetry.
  CHECK(std::abs(prod) < 1e-10);
}

TEST_CASE("invariant functionals evaluate their defining formulas") {
  PeriodicGrid grid = make_grid(0.0, 1.0, 4);  // dx = 1/4
  OperatorSet ops = make_upwind_operators(grid, 1);
  std::vector<double> u = {2.0, -2.0, 4.0, 0.0};
  CHECK(mass(ops, u) == doctest::Approx(1.0).epsilon(1e-15));        // dx * 4
  CHECK(energy_kdv(ops, u) == doctest::Approx(3.0).epsilon(1e-15));  // 0.5 * dx * 24

  KdvhState s;
  s.tau = 0.5;
  s.u = {2.0, 0.0, 0.0, 0.0};
  s.v = {0.0, 2.0, 0.0, 0.0};
  s.w = {0.0, 0.0, 4.0, 0.0};
  // 0.5 * dx * (4 + 0.5*4 + 0.5*16) = 0.125 * 14 = 1.75
  CHECK(energy_kdvh(ops, s) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("limit model stiff split matches the hyperbolic one on prepared data") {
  // For well-prepared data and tau -> 0 the u-component of the stiff split
  // approaches the third-derivative term of the limit equation.
  PeriodicGrid grid = make_grid(-20.0, 20.0, 256);
  OperatorSet ops = make_upwind_operators(grid, 6);
  std::vector<double> u0 = soliton_profile(1.0 / 3.0, grid.nodes);
  KdvhState s = well_prepared_state(ops, u0, 1e-8);
  std::vector<double> q = pack(s);
  std::vector<double> g(3 * grid.n);
  kdvh_split_g(ops, s.tau, q, g);

  std::vector<double> g_kdv(grid.n);
  kdv_split_g(ops, u0, g_kdv);
  // g_u = -D+ w = -D+ D D- u0 exactly for prepared data, independent of tau.
  for (std::size_t i = 0; i < grid.n; ++i)
    CHECK(g[i] == doctest::Approx(g_kdv[i]).epsilon(1e-12));
}
