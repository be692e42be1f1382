#pragma once

#include <cstddef>
#include <vector>

#include "sparsecirc/matrix.hpp"

namespace sparsecirc {

/// Eigenvalues with multiplicity, in no particular order.
struct SpectrumResult {
  std::vector<Complex> eigenvalues;
  std::size_t iterations_used = 0;
  bool converged = false;
};

/// Singular values sorted descending; values.back() is the least one.
struct SingularSpectrum {
  std::vector<double> values;
  double least() const { return values.empty() ? 0.0 : values.back(); }
};

struct EigenOptions {
  bool balance = true;
  /// Total QR sweeps allowed, as a multiple of n.
  std::size_t iteration_factor = 40;
  /// Exceptional shift after this many sweeps without a deflation.
  std::size_t exceptional_period = 10;
};

/// Unitary reduction to upper-Hessenberg form. Entries below the first
/// subdiagonal are exactly zero on return.
ComplexMatrix hessenberg(const ComplexMatrix& a);

/// Diagonal similarity scaling by powers of two that equalizes row and
/// column norms. Preserves the diagonal and the eigenvalues.
ComplexMatrix balance(const ComplexMatrix& a);

/// All eigenvalues via Hessenberg reduction and complex single-shift QR
/// (Wilkinson shift, deflation, exceptional shifts). On hitting the
/// iteration cap returns converged = false with the unconverged block's
/// diagonal standing in for its eigenvalues.
SpectrumResult eigenvalues(const ComplexMatrix& a, const EigenOptions& options = {});

/// Eigenvalues of a Hermitian matrix (Householder tridiagonalization and
/// implicit QL), ascending. Throws ContractError when ||B - B^H||_max
/// exceeds 1e-10 * ||B||_HS.
std::vector<double> hermitian_eigen(const ComplexMatrix& b);

/// Singular values via Golub-Kahan bidiagonalization. Works for
/// rectangular input; returns min(rows, cols) values.
SingularSpectrum singular_values(const ComplexMatrix& a);

/// d_i = dist(R_i, span{R_1..R_{i-1}}) by modified Gram-Schmidt with one
/// reorthogonalization pass. Distances at or below the zero tolerance are
/// reported as exactly 0.
std::vector<double> row_distance_sequence(const ComplexMatrix& a);

enum class DetMethod { Eigen, Singular, RowDist };

/// log |det A| as a sum of logs of eigenvalue moduli, singular values or
/// row distances. -infinity iff some factor is <= 1e-14 * ||A||_HS.
/// The Eigen route throws ConvergenceError if the eigensolver fails.
double log_abs_det(const ComplexMatrix& a, DetMethod method);

/// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const ComplexMatrix& a);

double least_singular_value(const ComplexMatrix& a);

/// H = [[0, A^H / sqrt(n)], [A / sqrt(n), 0]], a 2n x 2n Hermitian matrix
/// whose eigenvalues are the +/- singular values of A / sqrt(n).
ComplexMatrix dirac_block(const ComplexMatrix& a);

/// Relative threshold below which log_abs_det factors count as zero.
inline constexpr double kZeroFactorTolerance = 1e-14;

}  // namespace sparsecirc
