#pragma once

#include <cmath>
#include <span>

#include "sparsecirc/matrix.hpp"

namespace sparsecirc::detail {

// H = I - beta v v^H with H x = alpha e_1 and |alpha| = ||x||.
struct Reflector {
  double beta = 0.0;
  Complex alpha = 0.0;
};

// Overwrites x with v. When x has no weight below its first entry the
// reflector is the identity (beta = 0) and x is left untouched.
inline Reflector make_reflector(std::span<Complex> x) {
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += std::norm(x[i]);
  if (x.empty()) return {};
  if (tail == 0.0) return {0.0, x[0]};
  const double head = std::abs(x[0]);
  const double norm = std::sqrt(head * head + tail);
  const Complex phase = head == 0.0 ? Complex(1.0) : x[0] / head;
  const Complex alpha = -phase * norm;
  x[0] -= alpha;
  // ||v||^2 = 2 ||x|| (||x|| + |x_0|)
  return {1.0 / (norm * (norm + head)), alpha};
}

inline Complex dot_conj(std::span<const Complex> v, std::span<const Complex> w) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * w[i];
  return s;
}

// Symmetric tridiagonal eigenvalues (implicit QL). d holds the diagonal,
// e the off-diagonal with e.size() + 1 == d.size(). Eigenvalues are left
// in d, unsorted.
void tridiagonal_ql(std::span<double> d, std::span<const double> e);

}  // namespace sparsecirc::detail
