/// Micro-benchmarks for the hot paths: circulant operator application, the
/// split right-hand sides, and full ImEx steps of the three-field system
/// across the stage-solver backends.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kdvh/imex.hpp"
#include "kdvh/model.hpp"
#include "kdvh/operators.hpp"
#include "kdvh/stage_solver.hpp"
#include "kdvh/time_loop.hpp"

namespace {

kdvh::OperatorSet make_ops(const std::string& family, int n) {
  const kdvh::PeriodicGrid grid = kdvh::make_grid(-40.0, 40.0, n);
  if (family == "fourier") return kdvh::make_fourier_operator(grid);
  return kdvh::make_upwind_operators(grid, std::stoi(family));
}

std::vector<double> test_profile(const kdvh::OperatorSet& ops) {
  std::vector<double> u(static_cast<std::size_t>(ops.grid.n));
  for (int i = 0; i < ops.grid.n; ++i) {
    const double x = ops.grid.nodes[static_cast<std::size_t>(i)];
    u[static_cast<std::size_t>(i)] = 3.0 / std::cosh(x / 2.0) / std::cosh(x / 2.0);
  }
  return u;
}

void bench_operator_apply(benchmark::State& state, const std::string& family) {
  const int n = static_cast<int>(state.range(0));
  const kdvh::OperatorSet ops = make_ops(family, n);
  const std::vector<double> u = test_profile(ops);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    ops.d_plus.apply(u, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_d3_apply(benchmark::State& state, const std::string& family) {
  const int n = static_cast<int>(state.range(0));
  const kdvh::OperatorSet ops = make_ops(family, n);
  const std::vector<double> u = test_profile(ops);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    ops.d3.apply(u, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_rhs(benchmark::State& state, const std::string& family) {
  const int n = static_cast<int>(state.range(0));
  const kdvh::OperatorSet ops = make_ops(family, n);
  const kdvh::KdvhState s = kdvh::well_prepared_state(ops, test_profile(ops), 1e-3);
  const std::vector<double> q = kdvh::pack(s);
  std::vector<double> f(q.size());
  std::vector<double> g(q.size());
  for (auto _ : state) {
    kdvh::kdvh_split_f(ops, q, f);
    kdvh::kdvh_split_g(ops, s.tau, q, g);
    benchmark::DoNotOptimize(f.data());
    benchmark::DoNotOptimize(g.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_imex_step(benchmark::State& state, const std::string& family,
                     kdvh::SolverBackend backend) {
  const int n = static_cast<int>(state.range(0));
  const kdvh::OperatorSet ops = make_ops(family, n);
  const double tau = 1e-6;
  kdvh::TimeLoopOptions opts;
  opts.backend = backend;
  kdvh::KdvhIntegrator integrator(kdvh::find_tableau("ARS(4,4,3)"), ops, tau, opts);
  const std::vector<double> q0 = kdvh::pack(kdvh::well_prepared_state(ops, test_profile(ops), tau));
  std::vector<double> q = q0;
  for (auto _ : state) {
    integrator.step(q, 0.005);
    benchmark::DoNotOptimize(q.data());
    // Restart periodically so the state stays in the smooth regime.
    if (state.iterations() % 1024 == 0) q = q0;
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK_CAPTURE(bench_operator_apply, upwind2, "2")->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(bench_operator_apply, upwind8, "8")->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(bench_operator_apply, fourier, "fourier")->Arg(256)->Arg(1024)->Arg(4096);

BENCHMARK_CAPTURE(bench_d3_apply, upwind8, "8")->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(bench_d3_apply, fourier, "fourier")->Arg(1024)->Arg(4096);

BENCHMARK_CAPTURE(bench_rhs, upwind8, "8")->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(bench_rhs, fourier, "fourier")->Arg(1024)->Arg(4096);

BENCHMARK_CAPTURE(bench_imex_step, upwind8_sparse_lu, "8", kdvh::SolverBackend::sparse_lu)
    ->Arg(256)
    ->Arg(1024);
BENCHMARK_CAPTURE(bench_imex_step, fourier_spectral, "fourier", kdvh::SolverBackend::spectral)
    ->Arg(256)
    ->Arg(1024);
BENCHMARK_CAPTURE(bench_imex_step, upwind8_dense, "8", kdvh::SolverBackend::dense)->Arg(256);

BENCHMARK_MAIN();
