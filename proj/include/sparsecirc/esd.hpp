#pragma once

#include <cstddef>
#include <vector>

#include "sparsecirc/linalg.hpp"
#include "sparsecirc/matrix.hpp"

namespace sparsecirc {

/// Empirical spectral distribution: mass 1/n at each point, multiplicity
/// preserved. Never empty.
class Esd {
 public:
  /// Throws ContractError for an empty point set.
  explicit Esd(std::vector<Complex> points);

  std::size_t n() const noexcept { return points_.size(); }
  const std::vector<Complex>& points() const noexcept { return points_; }

  friend bool operator==(const Esd&, const Esd&) = default;

 private:
  std::vector<Complex> points_;
};

/// ESD of A / sqrt(n). Throws ConvergenceError if the eigensolver fails.
Esd esd_from_matrix(const ComplexMatrix& a, const EigenOptions& options = {});

/// Fraction of points with Re <= Re z and Im <= Im z.
double esd_cdf(const Esd& e, Complex z);

/// Uniform measure on the unit disk of the quadrant {Re <= Re z, Im <= Im z},
/// in closed form.
double disk_cdf(Complex z);

enum class TestFunctionKind { RadialBump, IndicatorRect };

/// RadialBump: f(z) = exp(s * (1 - 1 / (1 - t^2))) for t = |z - c| / r < 1,
/// zero otherwise; f(c) = 1. IndicatorRect belongs to the CDF path only.
struct TestFunction {
  TestFunctionKind kind = TestFunctionKind::RadialBump;
  Complex center = 0.0;
  double radius = 1.0;
  double smoothness = 1.0;
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;

  static TestFunction bump(Complex center, double radius, double smoothness = 1.0) {
    return {TestFunctionKind::RadialBump, center, radius, smoothness};
  }
  static TestFunction rect(double re_lo, double re_hi, double im_lo, double im_hi) {
    TestFunction f;
    f.kind = TestFunctionKind::IndicatorRect;
    f.re_lo = re_lo;
    f.re_hi = re_hi;
    f.im_lo = im_lo;
    f.im_hi = im_hi;
    return f;
  }

  double operator()(Complex z) const;
};

/// Nine bumps of radius 0.8 centred on the 3x3 grid {-1, 0, 1}^2.
std::vector<TestFunction> canonical_test_functions();

/// (1/n) sum f(point). Throws ContractError for IndicatorRect.
double integrate_test_function(const Esd& e, const TestFunction& f);

/// Integral of a bump against the uniform measure on the unit disk (polar
/// Gauss-Legendre x trapezoid quadrature).
double disk_integral(const TestFunction& f);

/// Square evaluation lattice [lo, hi]^2 with `size` nodes per side.
struct Lattice {
  double lo = -1.5;
  double hi = 1.5;
  std::size_t size = 64;
};

/// max |F1 - F2| over the points of both ESDs and the lattice.
double kolmogorov_discrepancy(const Esd& e1, const Esd& e2, const Lattice& lattice = {});
/// Same statistic against the uniform disk reference.
double kolmogorov_discrepancy(const Esd& e, const Lattice& lattice = {});

/// sup_r |#{|p| <= r} / n - min(r^2, 1)|, both one-sided limits at each radius.
double radial_ks(const Esd& e);

/// (1/n) sum |p|^2. The unit-disk value is 1/2.
double second_moment(const Esd& e);

/// Two-sample Kolmogorov-Smirnov statistic on the real line.
double real_line_ks(std::vector<double> a, std::vector<double> b);

struct DiscrepancyReport {
  double kolmogorov = 0.0;
  double radial_ks = 0.0;
  double second_moment_gap = 0.0;
  std::vector<double> test_function_gaps;

  double max_test_function_gap() const;
};

/// Discrepancy of an ESD against the uniform disk.
DiscrepancyReport compare_to_disk(const Esd& e, const Lattice& lattice = {});
/// Discrepancy between two ESDs; radial_ks is the two-sample statistic on moduli.
DiscrepancyReport compare(const Esd& e1, const Esd& e2, const Lattice& lattice = {});

}  // namespace sparsecirc
