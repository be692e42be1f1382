#include <cmath>
#include <vector>

#include "householder.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/linalg.hpp"

namespace sparsecirc {

namespace {

double cabs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

}  // namespace

ComplexMatrix hessenberg(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("hessenberg: matrix is not square");
  ComplexMatrix h = a;
  const std::size_t n = h.rows();
  if (n < 3) return h;

  std::vector<Complex> v;
  std::vector<Complex> w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    auto col = h.column(k).subspan(k + 1);
    const auto refl = detail::make_reflector(col);
    if (refl.beta == 0.0) continue;
    v.assign(col.begin(), col.end());
    col[0] = refl.alpha;
    for (std::size_t i = 1; i < col.size(); ++i) col[i] = 0.0;

    // Left: rows k+1.., columns k+1..
    for (std::size_t j = k + 1; j < n; ++j) {
      auto c = h.column(j).subspan(k + 1);
      const Complex s = refl.beta * detail::dot_conj(v, c);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] -= s * v[i];
    }
    // Right: all rows, columns k+1..
    std::fill(w.begin(), w.end(), Complex{});
    for (std::size_t jj = 0; jj < v.size(); ++jj) {
      const auto c = h.column(k + 1 + jj);
      const Complex vj = v[jj];
      for (std::size_t i = 0; i < n; ++i) w[i] += c[i] * vj;
    }
    for (std::size_t jj = 0; jj < v.size(); ++jj) {
      auto c = h.column(k + 1 + jj);
      const Complex f = refl.beta * std::conj(v[jj]);
      for (std::size_t i = 0; i < n; ++i) c[i] -= w[i] * f;
    }
  }
  return h;
}

ComplexMatrix balance(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("balance: matrix is not square");
  ComplexMatrix b = a;
  const std::size_t n = b.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  constexpr int max_sweeps = 100;

  bool done = false;
  for (int sweep = 0; sweep < max_sweeps && !done; ++sweep) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += cabs1(b(j, i));
        r += cabs1(b(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g && f < 0x1.0p+500) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c >= g && f > 0x1.0p-500) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) b(i, j) *= inv;
        for (auto& v : b.column(i)) v *= f;
      }
    }
  }
  return b;
}

}  // namespace sparsecirc
