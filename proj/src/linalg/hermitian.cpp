#include <algorithm>
#include <cmath>
#include <vector>

#include "householder.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/linalg.hpp"

namespace sparsecirc {

namespace detail {

void tridiagonal_ql(std::span<double> d, std::span<const double> e_in) {
  const std::size_t n = d.size();
  if (n == 0) return;
  std::vector<double> e(n, 0.0);
  std::copy(e_in.begin(), e_in.end(), e.begin());

  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i]));
  constexpr double eps = 0x1.0p-52;
  constexpr int max_iter = 60;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        // Relative test first; the absolute one is a backward-stable
        // perturbation of size eps * ||T|| and handles zero diagonals.
        if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= 0.5 * eps * tnorm) break;
      }
      if (m != l) {
        if (iter++ == max_iter)
          throw ConvergenceError("tridiagonal QL: no convergence after 60 iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(m) - 1;
        bool underflow = false;
        for (; i >= static_cast<std::ptrdiff_t>(l); --i) {
          const double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

std::vector<double> hermitian_eigen(const ComplexMatrix& b) {
  if (!b.is_square()) throw ShapeError("hermitian_eigen: matrix is not square");
  const std::size_t n = b.rows();
  const double norm = hs_norm(b);
  double asym = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) asym = std::max(asym, std::abs(b(i, j) - std::conj(b(j, i))));
  if (asym > 1e-10 * norm)
    throw ContractError("hermitian_eigen: matrix is not Hermitian (asymmetry " +
                        std::to_string(asym) + ")");
  if (n == 0) return {};

  ComplexMatrix a = b;
  std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
  std::vector<Complex> v, p(n), q(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    d[k] = a(k, k).real();
    auto col = a.column(k).subspan(k + 1);
    const auto refl = detail::make_reflector(col);
    e[k] = std::abs(refl.alpha);
    if (refl.beta == 0.0) continue;
    v.assign(col.begin(), col.end());
    const std::size_t m = v.size();
    const std::size_t off = k + 1;

    // p = beta T v, T the trailing block.
    std::fill(p.begin(), p.begin() + m, Complex{});
    for (std::size_t jj = 0; jj < m; ++jj) {
      const auto c = a.column(off + jj).subspan(off);
      const Complex vj = v[jj];
      for (std::size_t i = 0; i < m; ++i) p[i] += c[i] * vj;
    }
    for (std::size_t i = 0; i < m; ++i) p[i] *= refl.beta;
    const Complex kk =
        0.5 * refl.beta * detail::dot_conj(v, std::span<const Complex>(p.data(), m));
    for (std::size_t i = 0; i < m; ++i) q[i] = p[i] - kk * v[i];

    // T -= v q^H + q v^H
    for (std::size_t jj = 0; jj < m; ++jj) {
      auto c = a.column(off + jj).subspan(off);
      const Complex qj = std::conj(q[jj]);
      const Complex vj = std::conj(v[jj]);
      for (std::size_t i = 0; i < m; ++i) c[i] -= v[i] * qj + q[i] * vj;
    }
  }
  if (n >= 2) {
    d[n - 2] = a(n - 2, n - 2).real();
    e[n - 2] = std::abs(a(n - 1, n - 2));
  }
  d[n - 1] = a(n - 1, n - 1).real();

  detail::tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace sparsecirc
