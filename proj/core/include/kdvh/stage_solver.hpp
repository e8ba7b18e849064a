#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kdvh/model.hpp"
#include "kdvh/operators.hpp"

namespace kdvh {

/// How the implicit stage systems are solved.
///   sparse_lu: direct factorization of the assembled sparse matrix
///              (finite-difference families only).
///   spectral:  per-wavenumber 3x3 (or 1x1) complex solves after a real DFT;
///              works for any circulant family.
///   dense:     dense LU, intended as a small-n testing oracle.
enum class SolverBackend { sparse_lu, spectral, dense };

std::string to_string(SolverBackend backend);
SolverBackend backend_from_string(const std::string& s);

/// Natural choice per operator family: sparse_lu for stencils, spectral for
/// the Fourier family.
SolverBackend default_backend(OperatorKind kind);

/// Solves the implicit stage systems (I - a_dt G) x = rhs for the
/// three-field semidiscretization, where G is the stiff operator of
/// kdvh_split_g. One factorization is cached per distinct a_dt value, so
/// fixed-step runs factor once per distinct implicit diagonal entry.
///
/// The raw system is badly scaled for small tau (rows of G carry 1/tau), so
/// internally the v and w rows are multiplied by tau before factorization;
/// that equilibrated system stays uniformly well conditioned as tau -> 0.
/// Each solve is audited: the equilibrated residual must not exceed
/// 1e-12 times the equilibrated right-hand side norm, else a
/// std::runtime_error is thrown.
///
/// Instances are not thread-safe; use one per stepping run.
class KdvhStageSolver {
 public:
  KdvhStageSolver(const OperatorSet& ops, double tau, SolverBackend backend);
  ~KdvhStageSolver();
  KdvhStageSolver(KdvhStageSolver&&) noexcept;
  KdvhStageSolver& operator=(KdvhStageSolver&&) noexcept;

  /// x with (I - a_dt G) x = rhs over the flat [u|v|w] layout.
  /// a_dt = 0 returns rhs unchanged; a_dt < 0 is rejected.
  std::vector<double> solve(std::span<const double> rhs, double a_dt);

  SolverBackend backend() const;
  double tau() const;
  /// Number of distinct a_dt keys factored so far.
  int cached_factorizations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Same machinery for the limit equation: solves (I + a_dt D3) x = rhs,
/// the implicit stage system of the dispersion-implicit splitting.
class KdvStageSolver {
 public:
  KdvStageSolver(const OperatorSet& ops, SolverBackend backend);
  ~KdvStageSolver();
  KdvStageSolver(KdvStageSolver&&) noexcept;
  KdvStageSolver& operator=(KdvStageSolver&&) noexcept;

  std::vector<double> solve(std::span<const double> rhs, double a_dt);

  SolverBackend backend() const;
  int cached_factorizations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kdvh
