#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsecirc/errors.hpp"
#include "sparsecirc/linalg.hpp"

namespace sparsecirc {

namespace {

constexpr double kEps = 0x1.0p-52;

struct Rotation {
  double c;
  Complex s;
};

// [c s; -conj(s) c] maps (x, y) to (r, 0).
Rotation givens(Complex x, Complex y) {
  if (y == Complex{}) return {1.0, 0.0};
  const double ax = std::abs(x);
  if (ax == 0.0) return {0.0, std::conj(y) / std::abs(y)};
  const double r = std::hypot(ax, std::abs(y));
  return {ax / r, (x / ax) * std::conj(y) / r};
}

std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c, Complex d) {
  const Complex p = 0.5 * (a + d);
  const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  return {p + disc, p - disc};
}

// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
Complex wilkinson_shift(const ComplexMatrix& h, std::size_t hi) {
  const auto [l1, l2] = eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
  const Complex d = h(hi, hi);
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

// One implicit single-shift QR sweep on the active window [lo, hi]. Only
// the window is updated since eigenvectors are not needed.
void qr_sweep(ComplexMatrix& h, std::size_t lo, std::size_t hi, Complex shift) {
  Complex x = h(lo, lo) - shift;
  Complex y = h(lo + 1, lo);
  for (std::size_t k = lo; k < hi; ++k) {
    if (k > lo) {
      x = h(k, k - 1);
      y = h(k + 1, k - 1);
    }
    const auto [c, s] = givens(x, y);
    const Complex sc = std::conj(s);
    if (k > lo) {
      h(k, k - 1) = c * x + s * y;
      h(k + 1, k - 1) = 0.0;
    }
    for (std::size_t j = k; j <= hi; ++j) {
      const Complex a = h(k, j), b = h(k + 1, j);
      h(k, j) = c * a + s * b;
      h(k + 1, j) = c * b - sc * a;
    }
    const std::size_t last = std::min(k + 2, hi);
    auto ck = h.column(k);
    auto ck1 = h.column(k + 1);
    for (std::size_t i = lo; i <= last; ++i) {
      const Complex a = ck[i], b = ck1[i];
      ck[i] = c * a + sc * b;
      ck1[i] = c * b - s * a;
    }
  }
}

}  // namespace

SpectrumResult eigenvalues(const ComplexMatrix& a, const EigenOptions& options) {
  if (!a.is_square()) throw ShapeError("eigenvalues: matrix is not square");
  if (!a.all_finite()) throw ContractError("eigenvalues: matrix has non-finite entries");
  const std::size_t n = a.rows();
  SpectrumResult result;
  result.eigenvalues.assign(n, 0.0);
  if (n == 0) {
    result.converged = true;
    return result;
  }

  ComplexMatrix h = hessenberg(options.balance ? balance(a) : a);
  const double anorm = hs_norm(h);
  const double tiny = std::numeric_limits<double>::min();
  const std::size_t cap = options.iteration_factor * n;

  std::size_t total = 0;
  std::size_t stalled = 0;
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  while (hi >= 0) {
    // Find the top of the unreduced block ending at hi.
    std::ptrdiff_t lo = hi;
    for (; lo > 0; --lo) {
      const double sub = std::abs(h(lo, lo - 1));
      double tst = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (tst == 0.0) tst = anorm;
      if (sub <= kEps * tst || sub < tiny) {
        h(lo, lo - 1) = 0.0;
        break;
      }
    }

    if (lo == hi) {
      result.eigenvalues[hi] = h(hi, hi);
      --hi;
      stalled = 0;
      continue;
    }
    if (lo == hi - 1) {
      const auto [l1, l2] = eig2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
      result.eigenvalues[lo] = l1;
      result.eigenvalues[hi] = l2;
      hi -= 2;
      stalled = 0;
      continue;
    }
    if (total >= cap) {
      for (std::ptrdiff_t i = 0; i <= hi; ++i) result.eigenvalues[i] = h(i, i);
      result.iterations_used = total;
      result.converged = false;
      return result;
    }

    Complex shift;
    ++stalled;
    if (stalled % options.exceptional_period == 0) {
      shift = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
      if (stalled % (2 * options.exceptional_period) == 0)
        shift = h(lo, lo) + 0.75 * std::abs(h(lo + 1, lo));
    } else {
      shift = wilkinson_shift(h, static_cast<std::size_t>(hi));
    }
    qr_sweep(h, static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), shift);
    ++total;
  }

  result.iterations_used = total;
  result.converged = true;
  return result;
}

}  // namespace sparsecirc
