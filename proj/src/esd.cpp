#include "sparsecirc/esd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparsecirc/errors.hpp"

namespace sparsecirc {

namespace {

constexpr double kPi = std::numbers::pi;

// Antiderivative of sqrt(1 - x^2) on [-1, 1].
double half_chord_area(double x) {
  x = std::clamp(x, -1.0, 1.0);
  return 0.5 * (x * std::sqrt(1.0 - x * x) + std::asin(x));
}

double chord_integral(double x0, double x1) {
  return x1 > x0 ? half_chord_area(x1) - half_chord_area(x0) : 0.0;
}

std::vector<Complex> lattice_points(const Lattice& l) {
  std::vector<Complex> g;
  if (l.size == 0) return g;
  g.reserve(l.size * l.size);
  const double step = l.size > 1 ? (l.hi - l.lo) / static_cast<double>(l.size - 1) : 0.0;
  for (std::size_t i = 0; i < l.size; ++i)
    for (std::size_t j = 0; j < l.size; ++j)
      g.emplace_back(l.lo + step * static_cast<double>(i), l.lo + step * static_cast<double>(j));
  return g;
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      pp = static_cast<double>(m) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace

Esd::Esd(std::vector<Complex> points) : points_(std::move(points)) {
  if (points_.empty()) throw ContractError("an ESD needs at least one point");
}

Esd esd_from_matrix(const ComplexMatrix& a, const EigenOptions& options) {
  if (!a.is_square()) throw ShapeError("esd_from_matrix: matrix is not square");
  auto spec = eigenvalues(a, options);
  if (!spec.converged) throw ConvergenceError("esd_from_matrix: eigensolver did not converge");
  const double s = 1.0 / std::sqrt(static_cast<double>(a.rows()));
  for (auto& l : spec.eigenvalues) l *= s;
  return Esd(std::move(spec.eigenvalues));
}

double esd_cdf(const Esd& e, Complex z) {
  std::size_t count = 0;
  for (const auto& p : e.points())
    if (p.real() <= z.real() && p.imag() <= z.imag()) ++count;
  return static_cast<double>(count) / static_cast<double>(e.n());
}

double disk_cdf(Complex z) {
  const double a = std::clamp(z.real(), -1.0, 1.0);
  const double b = z.imag();
  if (b <= -1.0 || a <= -1.0) return 0.0;
  double area;
  if (b >= 1.0) {
    area = 2.0 * chord_integral(-1.0, a);
  } else {
    // Where sqrt(1 - x^2) <= |b| the vertical chord is either entirely
    // below b (b >= 0) or entirely above it (b < 0).
    const double w = std::sqrt(1.0 - b * b);
    const double mid = std::max(0.0, std::min(a, w) + w) * b + chord_integral(-w, std::min(a, w));
    if (b >= 0.0) {
      area = 2.0 * chord_integral(-1.0, std::min(a, -w)) + mid + 2.0 * chord_integral(w, a);
    } else {
      area = mid;
    }
  }
  return std::clamp(area / kPi, 0.0, 1.0);
}

double TestFunction::operator()(Complex z) const {
  if (kind == TestFunctionKind::IndicatorRect)
    return (z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi)
               ? 1.0
               : 0.0;
  const double t = std::abs(z - center) / radius;
  if (t >= 1.0) return 0.0;
  return std::exp(smoothness * (1.0 - 1.0 / (1.0 - t * t)));
}

std::vector<TestFunction> canonical_test_functions() {
  std::vector<TestFunction> fs;
  for (double re : {-1.0, 0.0, 1.0})
    for (double im : {-1.0, 0.0, 1.0}) fs.push_back(TestFunction::bump({re, im}, 0.8));
  return fs;
}

double integrate_test_function(const Esd& e, const TestFunction& f) {
  if (f.kind != TestFunctionKind::RadialBump)
    throw ContractError("integrate_test_function: indicator rectangles belong to the CDF path");
  double s = 0.0;
  for (const auto& p : e.points()) s += f(p);
  return s / static_cast<double>(e.n());
}

double disk_integral(const TestFunction& f) {
  if (f.kind != TestFunctionKind::RadialBump)
    throw ContractError("disk_integral: indicator rectangles belong to the CDF path");
  constexpr std::size_t radial = 96;
  constexpr std::size_t angular = 512;
  std::vector<double> x, w;
  gauss_legendre(radial, x, w);
  double total = 0.0;
  for (std::size_t i = 0; i < radial; ++i) {
    const double r = 0.5 * (x[i] + 1.0);
    double ring = 0.0;
    for (std::size_t k = 0; k < angular; ++k)
      ring += f(std::polar(r, 2.0 * kPi * static_cast<double>(k) / angular));
    total += 0.5 * w[i] * r * ring * (2.0 * kPi / angular);
  }
  return total / kPi;
}

double kolmogorov_discrepancy(const Esd& e1, const Esd& e2, const Lattice& lattice) {
  auto grid = lattice_points(lattice);
  grid.insert(grid.end(), e1.points().begin(), e1.points().end());
  grid.insert(grid.end(), e2.points().begin(), e2.points().end());
  double d = 0.0;
  for (const auto& z : grid) d = std::max(d, std::abs(esd_cdf(e1, z) - esd_cdf(e2, z)));
  return d;
}

double kolmogorov_discrepancy(const Esd& e, const Lattice& lattice) {
  auto grid = lattice_points(lattice);
  grid.insert(grid.end(), e.points().begin(), e.points().end());
  double d = 0.0;
  for (const auto& z : grid) d = std::max(d, std::abs(esd_cdf(e, z) - disk_cdf(z)));
  return d;
}

double radial_ks(const Esd& e) {
  std::vector<double> r;
  r.reserve(e.n());
  for (const auto& p : e.points()) r.push_back(std::abs(p));
  std::sort(r.begin(), r.end());
  const double n = static_cast<double>(r.size());
  double d = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double ref = std::min(r[k] * r[k], 1.0);
    d = std::max({d, std::abs(static_cast<double>(k + 1) / n - ref),
                  std::abs(static_cast<double>(k) / n - ref)});
  }
  return d;
}

double second_moment(const Esd& e) {
  double s = 0.0;
  for (const auto& p : e.points()) s += std::norm(p);
  return s / static_cast<double>(e.n());
}

double real_line_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ContractError("real_line_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double DiscrepancyReport::max_test_function_gap() const {
  double m = 0.0;
  for (double g : test_function_gaps) m = std::max(m, g);
  return m;
}

DiscrepancyReport compare_to_disk(const Esd& e, const Lattice& lattice) {
  DiscrepancyReport r;
  r.kolmogorov = kolmogorov_discrepancy(e, lattice);
  r.radial_ks = radial_ks(e);
  r.second_moment_gap = std::abs(second_moment(e) - 0.5);
  for (const auto& f : canonical_test_functions())
    r.test_function_gaps.push_back(std::abs(integrate_test_function(e, f) - disk_integral(f)));
  return r;
}

DiscrepancyReport compare(const Esd& e1, const Esd& e2, const Lattice& lattice) {
  DiscrepancyReport r;
  r.kolmogorov = kolmogorov_discrepancy(e1, e2, lattice);
  std::vector<double> m1, m2;
  for (const auto& p : e1.points()) m1.push_back(std::abs(p));
  for (const auto& p : e2.points()) m2.push_back(std::abs(p));
  r.radial_ks = real_line_ks(std::move(m1), std::move(m2));
  r.second_moment_gap = std::abs(second_moment(e1) - second_moment(e2));
  for (const auto& f : canonical_test_functions())
    r.test_function_gaps.push_back(
        std::abs(integrate_test_function(e1, f) - integrate_test_function(e2, f)));
  return r;
}

}  // namespace sparsecirc
