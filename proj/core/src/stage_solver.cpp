#include "kdvh/stage_solver.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "dft.hpp"

namespace kdvh {

std::string to_string(SolverBackend backend) {
  switch (backend) {
    case SolverBackend::sparse_lu: return "sparse_lu";
    case SolverBackend::spectral: return "spectral";
    case SolverBackend::dense: return "dense";
  }
  throw std::logic_error("unreachable");
}

SolverBackend backend_from_string(const std::string& s) {
  if (s == "sparse_lu" || s == "sparse" || s == "lu") return SolverBackend::sparse_lu;
  if (s == "spectral" || s == "fft") return SolverBackend::spectral;
  if (s == "dense") return SolverBackend::dense;
  throw std::invalid_argument("unknown solver backend '" + s +
                              "' (expected sparse_lu, spectral, or dense)");
}

SolverBackend default_backend(OperatorKind kind) {
  return kind == OperatorKind::fourier ? SolverBackend::spectral : SolverBackend::sparse_lu;
}

namespace {

using Complex = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<double>;
using SparseFact = Eigen::SparseLU<SparseMat>;
using DenseFact = Eigen::PartialPivLU<Eigen::MatrixXd>;

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

/// Row-major 3x3 complex inverse via the adjugate. The per-mode blocks this
/// sees are uniformly well conditioned (see the determinant bound at the
/// call site), so the adjugate is accurate and keeps solves branch-free.
std::array<Complex, 9> invert3(const std::array<Complex, 9>& m) {
  const Complex det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                      m[1] * (m[3] * m[8] - m[5] * m[6]) +
                      m[2] * (m[3] * m[7] - m[4] * m[6]);
  if (std::abs(det) == 0.0) throw std::runtime_error("singular 3x3 stage block");
  const Complex inv_det = 1.0 / det;
  return {(m[4] * m[8] - m[5] * m[7]) * inv_det, (m[2] * m[7] - m[1] * m[8]) * inv_det,
          (m[1] * m[5] - m[2] * m[4]) * inv_det, (m[5] * m[6] - m[3] * m[8]) * inv_det,
          (m[0] * m[8] - m[2] * m[6]) * inv_det, (m[2] * m[3] - m[0] * m[5]) * inv_det,
          (m[3] * m[7] - m[4] * m[6]) * inv_det, (m[1] * m[6] - m[0] * m[7]) * inv_det,
          (m[0] * m[4] - m[1] * m[3]) * inv_det};
}

/// Equilibrated three-field stage matrix: rows of (I - a G) belonging to v
/// and w are multiplied by tau, which removes every 1/tau entry:
///   [ I          0           a D+ ]
///   [ 0          tau I - a D a I  ]
///   [ a D-       -a I        tau I ]
SparseMat assemble_kdvh_scaled(const OperatorSet& ops, double tau, double a) {
  const int n = ops.grid.n;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 16);
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0);
    trip.emplace_back(n + i, n + i, tau);
    trip.emplace_back(2 * n + i, 2 * n + i, tau);
    trip.emplace_back(n + i, 2 * n + i, a);
    trip.emplace_back(2 * n + i, n + i, -a);
  }
  for (const auto& e : ops.d_plus.triplets()) trip.emplace_back(e.row, 2 * n + e.col, a * e.value);
  for (const auto& e : ops.d_central.triplets())
    trip.emplace_back(n + e.row, n + e.col, -a * e.value);
  for (const auto& e : ops.d_minus.triplets()) trip.emplace_back(2 * n + e.row, e.col, a * e.value);
  SparseMat s(3 * n, 3 * n);
  s.setFromTriplets(trip.begin(), trip.end());
  s.makeCompressed();
  return s;
}

Eigen::MatrixXd assemble_kdvh_scaled_dense(const OperatorSet& ops, double tau, double a) {
  const int n = ops.grid.n;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  const std::vector<double> dp = ops.d_plus.dense();
  const std::vector<double> dc = ops.d_central.dense();
  const std::vector<double> dm = ops.d_minus.dense();
  for (int i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    s(n + i, n + i) = tau;
    s(2 * n + i, 2 * n + i) = tau;
    s(n + i, 2 * n + i) += a;
    s(2 * n + i, n + i) -= a;
    for (int j = 0; j < n; ++j) {
      const std::size_t ij = static_cast<std::size_t>(i) * n + j;
      s(i, 2 * n + j) += a * dp[ij];
      s(n + i, n + j) -= a * dc[ij];
      s(2 * n + i, j) += a * dm[ij];
    }
  }
  return s;
}

std::vector<std::array<Complex, 9>> factor_kdvh_spectral(const OperatorSet& ops, double tau,
                                                         double a) {
  const int modes = ops.grid.n / 2 + 1;
  std::vector<std::array<Complex, 9>> inv(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) {
    const Complex sp = ops.d_plus.symbol(k);
    const Complex sm = ops.d_minus.symbol(k);
    const Complex sc = ops.d_central.symbol(k);
    // Equilibrated per-mode block. Its determinant is
    // (tau - a sc)(tau + a^2 |sp|^2) + a^2 whose real part is at least a^2
    // (sc is purely imaginary and sp sm = -|sp|^2), so it never vanishes.
    const std::array<Complex, 9> block = {1.0,    0.0,      a * sp, 0.0, tau - a * sc,
                                          a,      a * sm,   -a,     tau};
    inv[static_cast<std::size_t>(k)] = invert3(block);
  }
  return inv;
}

}  // namespace

struct KdvhStageSolver::Impl {
  OperatorSet ops;
  double tau = 1.0;
  SolverBackend kind = SolverBackend::sparse_lu;
  int n = 0;

  std::map<double, std::unique_ptr<SparseFact>> sparse_cache;
  std::map<double, std::unique_ptr<DenseFact>> dense_cache;
  std::map<double, std::vector<std::array<Complex, 9>>> spectral_cache;

  std::unique_ptr<detail::Dft> dft;
  std::vector<Complex> bu, bv, bw;
  std::vector<double> scratch;

  int factorizations = 0;

  /// Residual of the equilibrated system, measured against the equilibrated
  /// right-hand side. Computed with fresh operator applications, independent
  /// of the factorization path.
  void audit(std::span<const double> x, std::span<const double> rhs, double a) {
    const auto xu = x.subspan(0, n), xv = x.subspan(n, n), xw = x.subspan(2 * n, n);
    scratch.resize(static_cast<std::size_t>(n));
    std::vector<double> r(static_cast<std::size_t>(3) * n);
    double bnorm2 = 0.0;

    ops.d_plus.apply(xw, scratch);
    for (int i = 0; i < n; ++i) {
      r[i] = rhs[i] - xu[i] - a * scratch[i];
      bnorm2 += rhs[i] * rhs[i];
    }
    ops.d_central.apply(xv, scratch);
    for (int i = 0; i < n; ++i) {
      const double b = tau * rhs[n + i];
      r[n + i] = b - tau * xv[i] + a * scratch[i] - a * xw[i];
      bnorm2 += b * b;
    }
    ops.d_minus.apply(xu, scratch);
    for (int i = 0; i < n; ++i) {
      const double b = tau * rhs[2 * n + i];
      r[2 * n + i] = b - tau * xw[i] - a * scratch[i] + a * xv[i];
      bnorm2 += b * b;
    }
    const double rn = norm2(r);
    const double bn = std::sqrt(bnorm2);
    if (rn > 1e-12 * bn + 1e-300) {
      throw std::runtime_error("stage solve residual " + std::to_string(rn) +
                               " exceeds tolerance for a_dt = " + std::to_string(a) +
                               " (backend " + to_string(kind) + ")");
    }
  }
};

KdvhStageSolver::KdvhStageSolver(const OperatorSet& ops, double tau, SolverBackend backend)
    : impl_(new Impl) {
  if (!(tau > 0.0)) throw std::invalid_argument("stage solver requires tau > 0");
  if (backend == SolverBackend::sparse_lu && !ops.d_plus.is_stencil())
    throw std::invalid_argument("sparse_lu backend requires a stencil operator family");
  impl_->ops = ops;
  impl_->tau = tau;
  impl_->kind = backend;
  impl_->n = ops.grid.n;
  if (backend == SolverBackend::spectral) {
    impl_->dft = std::make_unique<detail::Dft>(ops.grid.n);
    const std::size_t m = static_cast<std::size_t>(impl_->dft->spectrum_size());
    impl_->bu.resize(m);
    impl_->bv.resize(m);
    impl_->bw.resize(m);
  }
}

KdvhStageSolver::~KdvhStageSolver() = default;
KdvhStageSolver::KdvhStageSolver(KdvhStageSolver&&) noexcept = default;
KdvhStageSolver& KdvhStageSolver::operator=(KdvhStageSolver&&) noexcept = default;

SolverBackend KdvhStageSolver::backend() const { return impl_->kind; }
double KdvhStageSolver::tau() const { return impl_->tau; }
int KdvhStageSolver::cached_factorizations() const { return impl_->factorizations; }

std::vector<double> KdvhStageSolver::solve(std::span<const double> rhs, double a_dt) {
  Impl& im = *impl_;
  const int n = im.n;
  if (rhs.size() != static_cast<std::size_t>(3) * n)
    throw std::invalid_argument("stage solve: rhs has wrong length");
  if (a_dt < 0.0) throw std::invalid_argument("stage solve: a_dt must be >= 0");
  std::vector<double> x(rhs.begin(), rhs.end());
  if (a_dt == 0.0) return x;

  switch (im.kind) {
    case SolverBackend::sparse_lu: {
      auto it = im.sparse_cache.find(a_dt);
      if (it == im.sparse_cache.end()) {
        auto fact = std::make_unique<SparseFact>();
        const SparseMat s = assemble_kdvh_scaled(im.ops, im.tau, a_dt);
        fact->analyzePattern(s);
        fact->factorize(s);
        if (fact->info() != Eigen::Success)
          throw std::runtime_error("sparse stage factorization failed");
        it = im.sparse_cache.emplace(a_dt, std::move(fact)).first;
        ++im.factorizations;
      }
      Eigen::VectorXd b(3 * n);
      for (int i = 0; i < n; ++i) {
        b[i] = rhs[i];
        b[n + i] = im.tau * rhs[n + i];
        b[2 * n + i] = im.tau * rhs[2 * n + i];
      }
      const Eigen::VectorXd sol = it->second->solve(b);
      for (int i = 0; i < 3 * n; ++i) x[static_cast<std::size_t>(i)] = sol[i];
      break;
    }
    case SolverBackend::dense: {
      auto it = im.dense_cache.find(a_dt);
      if (it == im.dense_cache.end()) {
        auto fact =
            std::make_unique<DenseFact>(assemble_kdvh_scaled_dense(im.ops, im.tau, a_dt));
        it = im.dense_cache.emplace(a_dt, std::move(fact)).first;
        ++im.factorizations;
      }
      Eigen::VectorXd b(3 * n);
      for (int i = 0; i < n; ++i) {
        b[i] = rhs[i];
        b[n + i] = im.tau * rhs[n + i];
        b[2 * n + i] = im.tau * rhs[2 * n + i];
      }
      const Eigen::VectorXd sol = it->second->solve(b);
      for (int i = 0; i < 3 * n; ++i) x[static_cast<std::size_t>(i)] = sol[i];
      break;
    }
    case SolverBackend::spectral: {
      auto it = im.spectral_cache.find(a_dt);
      if (it == im.spectral_cache.end()) {
        it = im.spectral_cache.emplace(a_dt, factor_kdvh_spectral(im.ops, im.tau, a_dt)).first;
        ++im.factorizations;
      }
      const auto& inv = it->second;
      const int modes = im.dft->spectrum_size();
      im.dft->forward(rhs.subspan(0, n), im.bu);
      im.dft->forward(rhs.subspan(n, n), im.bv);
      im.dft->forward(rhs.subspan(2 * n, n), im.bw);
      for (int k = 0; k < modes; ++k) {
        const auto& a3 = inv[static_cast<std::size_t>(k)];
        const Complex fu = im.bu[k];
        const Complex fv = im.tau * im.bv[k];
        const Complex fw = im.tau * im.bw[k];
        im.bu[k] = a3[0] * fu + a3[1] * fv + a3[2] * fw;
        im.bv[k] = a3[3] * fu + a3[4] * fv + a3[5] * fw;
        im.bw[k] = a3[6] * fu + a3[7] * fv + a3[8] * fw;
      }
      std::span<double> xs(x);
      im.dft->backward(im.bu, xs.subspan(0, n));
      im.dft->backward(im.bv, xs.subspan(n, n));
      im.dft->backward(im.bw, xs.subspan(2 * n, n));
      break;
    }
  }
  im.audit(x, rhs, a_dt);
  return x;
}

struct KdvStageSolver::Impl {
  OperatorSet ops;
  SolverBackend kind = SolverBackend::sparse_lu;
  int n = 0;

  std::map<double, std::unique_ptr<SparseFact>> sparse_cache;
  std::map<double, std::unique_ptr<DenseFact>> dense_cache;
  std::map<double, std::vector<Complex>> spectral_cache;

  std::unique_ptr<detail::Dft> dft;
  std::vector<Complex> spec;
  std::vector<double> scratch;

  int factorizations = 0;

  void audit(std::span<const double> x, std::span<const double> rhs, double a) {
    scratch.resize(static_cast<std::size_t>(n));
    ops.d3.apply(x, scratch);
    double rn2 = 0.0, bn2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = rhs[i] - x[i] - a * scratch[i];
      rn2 += r * r;
      bn2 += rhs[i] * rhs[i];
    }
    if (std::sqrt(rn2) > 1e-12 * std::sqrt(bn2) + 1e-300) {
      throw std::runtime_error("dispersion stage solve residual " + std::to_string(std::sqrt(rn2)) +
                               " exceeds tolerance for a_dt = " + std::to_string(a));
    }
  }
};

KdvStageSolver::KdvStageSolver(const OperatorSet& ops, SolverBackend backend) : impl_(new Impl) {
  if (backend == SolverBackend::sparse_lu && !ops.d3.is_stencil())
    throw std::invalid_argument("sparse_lu backend requires a stencil operator family");
  impl_->ops = ops;
  impl_->kind = backend;
  impl_->n = ops.grid.n;
  if (backend == SolverBackend::spectral) {
    impl_->dft = std::make_unique<detail::Dft>(ops.grid.n);
    impl_->spec.resize(static_cast<std::size_t>(impl_->dft->spectrum_size()));
  }
}

KdvStageSolver::~KdvStageSolver() = default;
KdvStageSolver::KdvStageSolver(KdvStageSolver&&) noexcept = default;
KdvStageSolver& KdvStageSolver::operator=(KdvStageSolver&&) noexcept = default;

SolverBackend KdvStageSolver::backend() const { return impl_->kind; }
int KdvStageSolver::cached_factorizations() const { return impl_->factorizations; }

std::vector<double> KdvStageSolver::solve(std::span<const double> rhs, double a_dt) {
  Impl& im = *impl_;
  const int n = im.n;
  if (rhs.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("stage solve: rhs has wrong length");
  if (a_dt < 0.0) throw std::invalid_argument("stage solve: a_dt must be >= 0");
  std::vector<double> x(rhs.begin(), rhs.end());
  if (a_dt == 0.0) return x;

  switch (im.kind) {
    case SolverBackend::sparse_lu: {
      auto it = im.sparse_cache.find(a_dt);
      if (it == im.sparse_cache.end()) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
        for (const auto& e : im.ops.d3.triplets())
          trip.emplace_back(e.row, e.col, a_dt * e.value);
        SparseMat s(n, n);
        s.setFromTriplets(trip.begin(), trip.end());
        s.makeCompressed();
        auto fact = std::make_unique<SparseFact>();
        fact->analyzePattern(s);
        fact->factorize(s);
        if (fact->info() != Eigen::Success)
          throw std::runtime_error("sparse stage factorization failed");
        it = im.sparse_cache.emplace(a_dt, std::move(fact)).first;
        ++im.factorizations;
      }
      Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
      const Eigen::VectorXd sol = it->second->solve(b);
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = sol[i];
      break;
    }
    case SolverBackend::dense: {
      auto it = im.dense_cache.find(a_dt);
      if (it == im.dense_cache.end()) {
        const std::vector<double> d3 = im.ops.d3.dense();
        Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s(i, j) += a_dt * d3[static_cast<std::size_t>(i) * n + j];
        it = im.dense_cache.emplace(a_dt, std::make_unique<DenseFact>(s)).first;
        ++im.factorizations;
      }
      Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
      const Eigen::VectorXd sol = it->second->solve(b);
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = sol[i];
      break;
    }
    case SolverBackend::spectral: {
      auto it = im.spectral_cache.find(a_dt);
      if (it == im.spectral_cache.end()) {
        const int modes = im.dft->spectrum_size();
        std::vector<Complex> inv(static_cast<std::size_t>(modes));
        for (int k = 0; k < modes; ++k) {
          // d3 has a purely imaginary symbol, so 1 + a_dt*sigma never vanishes
          inv[static_cast<std::size_t>(k)] = 1.0 / (1.0 + a_dt * im.ops.d3.symbol(k));
        }
        it = im.spectral_cache.emplace(a_dt, std::move(inv)).first;
        ++im.factorizations;
      }
      im.dft->forward(rhs, im.spec);
      const auto& inv = it->second;
      for (std::size_t k = 0; k < inv.size(); ++k) im.spec[k] *= inv[k];
      im.dft->backward(im.spec, x);
      break;
    }
  }
  im.audit(x, rhs, a_dt);
  return x;
}

}  // namespace kdvh
