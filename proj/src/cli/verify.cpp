#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "../io/text.hpp"
#include "sparsecirc/cli.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/io.hpp"
#include "sparsecirc/linalg.hpp"

namespace sparsecirc {

namespace {

ComplexMatrix gaussian_matrix(std::size_t n, std::uint64_t label) {
  EnsembleSpec spec{Atom::ComplexGaussian, make_sparse_params(1.0, static_cast<long long>(n)), {}, false};
  return sample_matrix(spec, SeedPath(0x5EED, {label, n}));
}

CheckResult check(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    return {std::move(name), ok, std::move(detail)};
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("threw: ") + e.what()};
  }
}

std::string num(double v) { return detail::shortest(v); }

}  // namespace

std::vector<CheckResult> run_verify_suite() {
  std::vector<CheckResult> out;

  out.push_back(check("determinant identity (eigen, singular, row distance)", [] {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
      const auto a = gaussian_matrix(20, k);
      const double e = log_abs_det(a, DetMethod::Eigen);
      const double s = log_abs_det(a, DetMethod::Singular);
      const double r = log_abs_det(a, DetMethod::RowDist);
      worst = std::max({worst, std::abs(e - s), std::abs(e - r), std::abs(s - r)});
    }
    return std::pair{worst <= 1e-6, "max gap " + num(worst)};
  }));

  out.push_back(check("eigenvalue trace and Schur invariants", [] {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 5; ++k) {
      const auto a = gaussian_matrix(50, 100 + k);
      const auto spec = eigenvalues(a);
      if (!spec.converged) return std::pair{false, std::string("eigensolver did not converge")};
      Complex sum = 0.0;
      double sq = 0.0;
      for (const auto& l : spec.eigenvalues) {
        sum += l;
        sq += std::norm(l);
      }
      const double hs = hs_norm(a);
      worst = std::max(worst, std::abs(sum - a.trace()) / std::max(std::abs(a.trace()), hs));
      if (sq > hs * hs * (1.0 + 1e-10)) return std::pair{false, std::string("Schur inequality violated")};
    }
    return std::pair{worst <= 1e-10, "relative trace gap " + num(worst)};
  }));

  out.push_back(check("Dirac block spectrum is +/- singular values", [] {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 5; ++k) {
      const auto a = gaussian_matrix(30, 200 + k);
      worst = std::max(worst, dirac_pm_deviation(a, hermitian_eigen(dirac_block(a))));
    }
    return std::pair{worst <= 1e-8, "max deviation " + num(worst)};
  }));

  out.push_back(check("disk CDF half-disk marginal", [] {
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double a = -1.0 + 0.1 * k;
      const double ref = (a * std::sqrt(1.0 - a * a) + std::asin(a) + std::numbers::pi / 2) / std::numbers::pi;
      worst = std::max(worst, std::abs(disk_cdf({a, 1.0}) - ref));
    }
    return std::pair{worst <= 1e-9, "max gap " + num(worst)};
  }));

  out.push_back(check("ESD scaling contract", [] {
    const std::size_t n = 9;
    auto a = ComplexMatrix::identity(n);
    a *= Complex(0.5 * 3.0, 0.0);
    const auto e = esd_from_matrix(a);
    const bool ok = std::all_of(e.points().begin(), e.points().end(), [](Complex p) { return p == Complex(0.5); });
    return std::pair{ok, std::string()};
  }));

  out.push_back(check("eigenvalue CSV round trip", [] {
    const auto spec = eigenvalues(gaussian_matrix(40, 300));
    auto pts = spec.eigenvalues;
    std::sort(pts.begin(), pts.end(), [](Complex x, Complex y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    const Esd e(pts);
    return std::pair{parse_eigenvalues_csv(format_eigenvalues_csv(e)) == e, std::string()};
  }));

  out.push_back(check("SVG determinism and marker count", [] {
    const Esd e(eigenvalues(gaussian_matrix(25, 400)).eigenvalues);
    FigureSpec f;
    f.overlay = true;
    const auto s1 = render_scatter_svg(f, e), s2 = render_scatter_svg(f, e);
    std::size_t markers = 0;
    for (std::size_t p = 0; (p = s1.find("class=\"marker\"", p)) != std::string::npos; ++p) ++markers;
    return std::pair{s1 == s2 && markers == 25, std::to_string(markers) + " markers"};
  }));

  out.push_back(check("report reproducible across worker counts", [] {
    RunConfig cfg;
    cfg.n_values = {30, 60};
    cfg.trials = 3;
    std::string first;
    for (std::size_t w : {1, 2, 4}) {
      const auto text = format_report(run_experiment(cfg, {w, false}));
      if (first.empty()) first = text;
      else if (text != first) return std::pair{false, "differs at " + std::to_string(w) + " workers"};
    }
    return std::pair{true, std::string()};
  }));

  out.push_back(check("Bernoulli truncated moment is exactly zero", [] {
    for (std::size_t n : {2, 10, 1000}) {
      const auto p = make_sparse_params(0.5, static_cast<long long>(n));
      for (auto s : {SparseScaling::Mean, SparseScaling::Ensemble})
        if (truncated_moment_estimate(Atom::BernoulliPM1, p, s, 10000, SeedPath(7)) != 0.0)
          return std::pair{false, "nonzero at n=" + std::to_string(n)};
    }
    return std::pair{true, std::string()};
  }));

  out.push_back(check("config parser defaults and range errors", [] {
    const auto cfg = parse_config("experiment=circular-law\nn_values=200,500\n");
    bool ok = cfg.trials == 5 && cfg.effective_alpha() == 0.4 && cfg.atom == Atom::BernoulliPM1;
    for (const char* bad : {"n_values=10\nalpha=0\n", "n_values=10\nalpha=1.5\n", "n_values=10\nbogus=1\n"}) {
      try {
        parse_config(bad);
        ok = false;
      } catch (const ConfigError&) {
      }
    }
    return std::pair{ok, std::string()};
  }));

  return out;
}

}  // namespace sparsecirc
