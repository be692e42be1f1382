#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "householder.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/linalg.hpp"

namespace sparsecirc {

double hs_norm(const ComplexMatrix& a) {
  // Scaled accumulation guards against overflow for large entries.
  double scale = 0.0, ssq = 1.0;
  for (const auto& z : a.data()) {
    for (double x : {z.real(), z.imag()}) {
      const double ax = std::abs(x);
      if (ax == 0.0) continue;
      if (scale < ax) {
        ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
        scale = ax;
      } else {
        ssq += (ax / scale) * (ax / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

SingularSpectrum singular_values(const ComplexMatrix& input) {
  // Bidiagonalize a tall matrix; a wide one is handled through its adjoint.
  ComplexMatrix a = input.rows() >= input.cols() ? input : input.adjoint();
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (n == 0) return {};

  std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
  std::vector<Complex> v, w(m);
  for (std::size_t k = 0; k < n; ++k) {
    // Left reflector zeroes column k below the diagonal.
    {
      auto col = a.column(k).subspan(k);
      const auto refl = detail::make_reflector(col);
      d[k] = std::abs(refl.alpha);
      if (refl.beta != 0.0) {
        v.assign(col.begin(), col.end());
        for (std::size_t j = k + 1; j < n; ++j) {
          auto c = a.column(j).subspan(k);
          const Complex s = refl.beta * detail::dot_conj(v, c);
          for (std::size_t i = 0; i < c.size(); ++i) c[i] -= s * v[i];
        }
      }
    }
    if (k + 1 >= n) break;
    // Right reflector zeroes row k beyond the superdiagonal. Built from the
    // conjugated row so that (row) * H = conj(alpha) e_1.
    const std::size_t len = n - k - 1;
    v.resize(len);
    for (std::size_t jj = 0; jj < len; ++jj) v[jj] = std::conj(a(k, k + 1 + jj));
    const auto refl = detail::make_reflector(v);
    e[k] = std::abs(refl.alpha);
    if (refl.beta == 0.0) continue;
    // Rows k+1.. of columns k+1.. get A <- A H.
    const std::size_t rows = m - k - 1;
    std::fill(w.begin(), w.begin() + rows, Complex{});
    for (std::size_t jj = 0; jj < len; ++jj) {
      const auto c = a.column(k + 1 + jj).subspan(k + 1);
      const Complex vj = v[jj];
      for (std::size_t i = 0; i < rows; ++i) w[i] += c[i] * vj;
    }
    for (std::size_t jj = 0; jj < len; ++jj) {
      auto c = a.column(k + 1 + jj).subspan(k + 1);
      const Complex f = refl.beta * std::conj(v[jj]);
      for (std::size_t i = 0; i < rows; ++i) c[i] -= w[i] * f;
    }
  }

  // The bidiagonal's singular values are the nonnegative eigenvalues of the
  // 2n x 2n zero-diagonal tridiagonal with off-diagonal (d0, e0, d1, ...).
  std::vector<double> diag(2 * n, 0.0), off(2 * n - 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    off[2 * k] = d[k];
    if (k + 1 < n) off[2 * k + 1] = e[k];
  }
  detail::tridiagonal_ql(diag, off);
  std::sort(diag.begin(), diag.end(), std::greater<>());
  SingularSpectrum out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = std::abs(diag[k]);
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double least_singular_value(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("least_singular_value: matrix is not square");
  return singular_values(a).least();
}

std::vector<double> row_distance_sequence(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("row_distance_sequence: matrix is not square");
  const std::size_t n = a.rows();
  const double zero_tol = kZeroFactorTolerance * hs_norm(a);

  std::vector<std::vector<Complex>> basis;
  basis.reserve(n);
  std::vector<double> dist(n);
  std::vector<Complex> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) r[j] = a(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const Complex c = detail::dot_conj(q, r);
        for (std::size_t j = 0; j < n; ++j) r[j] -= c * q[j];
      }
    }
    double s = 0.0;
    for (const auto& x : r) s += std::norm(x);
    const double di = std::sqrt(s);
    if (di <= zero_tol) {
      dist[i] = 0.0;
      continue;
    }
    dist[i] = di;
    auto& q = basis.emplace_back(r);
    for (auto& x : q) x /= di;
  }
  return dist;
}

double log_abs_det(const ComplexMatrix& a, DetMethod method) {
  if (!a.is_square()) throw ShapeError("log_abs_det: matrix is not square");
  const double zero_tol = kZeroFactorTolerance * hs_norm(a);
  std::vector<double> factors;
  switch (method) {
    case DetMethod::Eigen: {
      const auto spec = eigenvalues(a);
      if (!spec.converged) throw ConvergenceError("log_abs_det: eigensolver did not converge");
      factors.reserve(spec.eigenvalues.size());
      for (const auto& l : spec.eigenvalues) factors.push_back(std::abs(l));
      break;
    }
    case DetMethod::Singular:
      factors = singular_values(a).values;
      break;
    case DetMethod::RowDist:
      factors = row_distance_sequence(a);
      break;
  }
  double sum = 0.0;
  for (double f : factors) {
    if (f <= zero_tol) return -std::numeric_limits<double>::infinity();
    sum += std::log(f);
  }
  return sum;
}

ComplexMatrix dirac_block(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("dirac_block: matrix is not square");
  const std::size_t n = a.rows();
  ComplexMatrix h(2 * n, 2 * n);
  if (n == 0) return h;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const Complex v = a(i, j) * s;
      h(n + i, j) = v;
      h(j, n + i) = std::conj(v);
    }
  return h;
}

}  // namespace sparsecirc
