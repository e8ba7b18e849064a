#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kdvh/grid.hpp"

namespace kdvh {

namespace detail {
class Dft;
}

enum class OperatorKind { upwind_fd, fourier };

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& s);

/// A periodic circulant operator on grid functions. Finite-difference
/// variants carry an explicit stencil; spectral variants carry the DFT
/// symbol (one eigenvalue per resolvable mode) and act through FFTs.
class CirculantOperator {
public:
  CirculantOperator() = default;

  /// Stencil constructor: (A u)_i = sum_k coeffs[k] * u[(i + offsets[k]) mod n].
  /// Coefficients already include any 1/dx^m scaling.
  static CirculantOperator from_stencil(int n, std::vector<int> offsets, std::vector<double> coeffs);

  /// Spectral constructor: multiplier spectrum[k] on mode k, k = 0..n/2,
  /// applied through forward/inverse real DFT. n must be even.
  static CirculantOperator from_spectrum(int n, std::vector<std::complex<double>> spectrum);

  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> operator()(std::span<const double> in) const;

  int size() const { return n_; }
  bool is_stencil() const { return dft_ == nullptr; }
  const std::vector<int>& offsets() const;
  const std::vector<double>& coeffs() const;

  /// Eigenvalue of the operator on DFT mode k (0 <= k <= n/2).
  std::complex<double> symbol(int k) const;

  /// Transpose (also circulant).
  CirculantOperator transpose() const;
  /// Scaled operator.
  CirculantOperator scaled(double factor) const;

  /// Dense n x n row-major matrix. Intended for tests and small-n oracles.
  std::vector<double> dense() const;

  /// Nonzero entries (row, col, value). Spectral operators are dense
  /// circulants, so this is only supported for stencil operators.
  struct Entry {
    int row, col;
    double value;
  };
  std::vector<Entry> triplets() const;

private:
  int n_ = 0;
  std::vector<int> offsets_;
  std::vector<double> coeffs_;
  std::shared_ptr<const detail::Dft> dft_;
  std::vector<std::complex<double>> spectrum_; // size n/2+1 when spectral
};

/// Product a*b of two circulant operators (stencils convolve, spectra multiply).
CirculantOperator compose(const CirculantOperator& a, const CirculantOperator& b);

/// First-derivative operator family on a periodic grid with the diagonal
/// norm M = dx*I. The pair (d_plus, d_minus) satisfies d_minus = -d_plus^T
/// with dissipative difference, d_central = (d_plus + d_minus)/2 is
/// antisymmetric, and d3 = d_plus * d_central * d_minus approximates the
/// third derivative.
struct OperatorSet {
  PeriodicGrid grid;
  OperatorKind kind = OperatorKind::upwind_fd;
  int order = 0; // requested accuracy order; 0 for the spectral family
  CirculantOperator d_plus, d_minus, d_central, d3;

  double norm_weight() const { return grid.dx; } // diagonal entry of M
};

/// Upwind finite-difference family of accuracy `order` (1..8). Throws
/// std::invalid_argument for unsupported order or a grid too small for the
/// stencil width; throws std::runtime_error if the dissipativity check of
/// the constructed pair fails.
OperatorSet make_upwind_operators(const PeriodicGrid& grid, int order);

/// Fourier pseudospectral family: d_plus = d_minus = d_central with the
/// Nyquist mode projected out. Requires even n.
OperatorSet make_fourier_operator(const PeriodicGrid& grid);

/// M-weighted inner product a^T M b = dx * sum_i a_i b_i.
double dot_m(const OperatorSet& ops, std::span<const double> a, std::span<const double> b);
/// Induced norm sqrt(dot_m(a, a)).
double norm_m(const OperatorSet& ops, std::span<const double> a);

/// Residuals of the algebraic identities the operator family promises.
/// All residuals are scaled to be compared against ~1e-12 tolerances.
struct OperatorCheckReport {
  std::string kind;
  int order = 0;
  int n = 0;
  double dx = 0.0;
  double central_skew_residual = 0.0;     // |<w, (MD + D^T M) v>| probes
  double upwind_duality_residual = 0.0;   // |<w, (M D+ + D-^T M) v>| probes
  double dissipation_max_quadratic = 0.0; // max_v v^T M (D+ - D-) v / |v|^2
  double consistency_residual = 0.0;      // max |D 1|, |D+ 1|, |D- 1| (times dx)
  double accuracy_residual = 0.0;         // worst trig-polynomial derivative error
  double fourier_pair_mismatch = 0.0;     // max |(D+ - D-) v| (spectral family)
  bool passed = false;

  std::string to_json(int indent = 2) const;
};

/// Recompute all identity residuals for an operator family. Deterministic
/// (fixed probe seed).
OperatorCheckReport self_check(const OperatorSet& ops);

} // namespace kdvh
