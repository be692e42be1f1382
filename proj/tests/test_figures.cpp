#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sparsecirc/ensembles.hpp"
#include "sparsecirc/esd.hpp"
#include "sparsecirc/io.hpp"

using namespace sparsecirc;

// One 2000 x 2000 sparse Bernoulli matrix at alpha = 0.4, the size of the
// published scatter plots.
TEST_CASE("sparse Bernoulli scatter at n = 2000") {
  // Built once; doctest re-enters the body for every subcase.
  static const Esd e = [] {
    const EnsembleSpec spec{Atom::BernoulliPM1, make_sparse_params(0.4, 2000), {}, true};
    return esd_from_matrix(sample_matrix(spec, SeedPath(2000)));
  }();
  REQUIRE(e.n() == 2000);

  SUBCASE("dense disk, at most 2% of markers outside radius 1.1") {
    FigureSpec f;
    f.overlay = true;
    const auto svg = render_scatter_svg(f, e);
    std::size_t markers = 0, outside = 0;
    // Marker centres are written in pixels: 520 px per 3 data units, origin at (300, 300).
    for (std::size_t p = 0; (p = svg.find("class=\"marker\" cx=\"", p)) != std::string::npos; ++p) {
      double cx = 0, cy = 0;
      std::sscanf(svg.c_str() + p, "class=\"marker\" cx=\"%lf\" cy=\"%lf\"", &cx, &cy);
      const double x = (cx - 300.0) * 3.0 / 520.0, y = (300.0 - cy) * 3.0 / 520.0;
      ++markers;
      outside += std::hypot(x, y) > 1.1;
    }
    CHECK(markers == 2000);
    CHECK(static_cast<double>(outside) / markers <= 0.02);
    CHECK(fraction_outside(e, 1.1) <= 0.02);
  }
  SUBCASE("wide bump integral matches the disk reference within 0.05") {
    const auto f = TestFunction::bump(0.0, 1.2);
    // 10^6-node midpoint rule over the square, restricted to the disk.
    const int m = 1000;
    const double h = 2.0 / m;
    double ref = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Complex z(-1 + (i + 0.5) * h, -1 + (j + 0.5) * h);
        if (std::norm(z) <= 1.0) ref += f(z);
      }
    ref *= h * h / std::numbers::pi;
    CHECK(std::abs(integrate_test_function(e, f) - ref) <= 0.05);
    CHECK(std::abs(disk_integral(f) - ref) <= 2e-3);
  }
}
