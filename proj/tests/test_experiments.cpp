#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/experiments.hpp"
#include "sparsecirc/io.hpp"
#include "sparsecirc/linalg.hpp"

using namespace sparsecirc;

namespace {

RunConfig small(ExperimentId id, std::vector<std::size_t> ns, std::size_t trials) {
  RunConfig c;
  c.experiment = id;
  c.n_values = std::move(ns);
  c.trials = trials;
  return c;
}

}  // namespace

TEST_CASE("summary helpers") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(median({1, std::nan(""), 5, INFINITY}) == 3.0);
  CHECK(std::isnan(median({})));
  CHECK(strictly_decreasing(std::vector<double>{3, 2, 1}));
  CHECK_FALSE(strictly_decreasing(std::vector<double>{3, 3, 1}));
  CHECK_FALSE(strictly_decreasing(std::vector<double>{3, std::nan(""), 1}));
  CHECK(non_increasing(std::vector<double>{3, 3, 1}));
  CHECK_FALSE(non_increasing(std::vector<double>{1, 2}));
  CHECK(strictly_decreasing(std::vector<double>{7}));
}

TEST_CASE("fitted floor exponent") {
  const std::vector<std::size_t> ns{100, 200, 400, 800};
  std::vector<double> m;
  for (auto n : ns) m.push_back(3.0 * std::pow(static_cast<double>(n), -2.0));
  CHECK(*fitted_floor_exponent(ns, m) == doctest::Approx(2.0));
  CHECK_FALSE(fitted_floor_exponent(std::vector<std::size_t>{100}, std::vector<double>{0.1}).has_value());
  CHECK_FALSE(fitted_floor_exponent(ns, std::vector<double>{0, 0, 0, 0}).has_value());
}

TEST_CASE("config validation") {
  auto c = small(ExperimentId::CircularLaw, {10, 20}, 2);
  CHECK_NOTHROW(validate(c));
  c.alpha = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.alpha = 0.4;
  c.n_values = {20, 10};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.n_values = {10};
  c.trials = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.trials = 1;
  c.z_probe = Complex(3, 1);
  CHECK_THROWS_AS(validate(c), ConfigError);

  SUBCASE("distance range") {
    auto d = small(ExperimentId::DistanceConcentration, {400}, 1);
    d.d_fraction = 0.3;
    CHECK(max_subspace_dimension(400, 0.4) == doctest::Approx(400 - std::pow(400.0, 1 - 0.4 / 6)));
    CHECK_NOTHROW(validate(d));
    d.d_fraction = 0.5;
    CHECK_THROWS_AS(validate(d), ConfigError);
    d.enforce_subspace_range = false;
    CHECK_NOTHROW(validate(d));
    auto e = small(ExperimentId::DistanceConcentration, {5}, 1);
    e.d_fraction = 0.8;  // d = n - 1 = 4 > 5 - 5^(0.933)
    CHECK_THROWS_AS(validate(e), ConfigError);
  }
  SUBCASE("law of large numbers sample size") {
    auto l = small(ExperimentId::SparseLln, {100}, 1);
    l.lln_m = 50;
    CHECK_THROWS_AS(validate(l), ConfigError);
    l.lln_m = 100;
    CHECK_NOTHROW(validate(l));
  }
  SUBCASE("per-experiment defaults") {
    CHECK(small(ExperimentId::RateStudy, {10}, 1).effective_alpha() == 0.2);
    CHECK(small(ExperimentId::CircularLaw, {10}, 1).effective_alpha() == 0.4);
    CHECK(small(ExperimentId::SparseLln, {10}, 1).effective_scaling() == SparseScaling::Mean);
    CHECK(small(ExperimentId::TruncationDecay, {10}, 1).effective_scaling() == SparseScaling::Mean);
    CHECK(small(ExperimentId::Universality, {10}, 1).effective_scaling() == SparseScaling::Ensemble);
  }
}

TEST_CASE("catalog") {
  const auto& cat = experiment_catalog();
  for (std::size_t k = 0; k < cat.size(); ++k) {
    CHECK(static_cast<std::size_t>(cat[k].id) == k);
    CHECK(parse_experiment(cat[k].name) == cat[k].id);
    CHECK_FALSE(cat[k].anchor.empty());
  }
  CHECK_FALSE(parse_experiment("nope").has_value());
}

TEST_CASE("circular law runner") {
  SUBCASE("record count, flags and criterion ids") {
    const auto r = run_circular_law(small(ExperimentId::CircularLaw, {20, 40}, 3));
    CHECK(r.records.size() == 6);
    CHECK(r.summary.size() == 2);
    for (const auto& rec : r.records) {
      CHECK(rec.get("radial_ks").has_value());
      CHECK(rec.get("kolmogorov").has_value());
    }
    REQUIRE(r.flag("monotone-decay") != nullptr);
    for (const auto& f : r.flags) CHECK_FALSE(f.criterion.empty());
    CHECK(r.version == kVersion);
  }
  SUBCASE("single-point sweep has no decay flag") {
    const auto r = run_circular_law(small(ExperimentId::CircularLaw, {4}, 1));
    CHECK(r.records.size() == 1);
    CHECK(r.flag("monotone-decay") == nullptr);
    CHECK(r.summary_value(4, "median_radial_ks").has_value());
  }
  SUBCASE("baseline flag") {
    auto c = small(ExperimentId::CircularLaw, {30}, 2);
    c.baseline = 1.0;
    const auto r = run_circular_law(c);
    REQUIRE(r.flag("below-baseline") != nullptr);
    CHECK(r.flag("below-baseline")->state == FlagState::Pass);
    c.baseline = 1e-9;
    CHECK(run_circular_law(c).flag("below-baseline")->state == FlagState::Fail);
  }
  SUBCASE("shift rejected") {
    auto c = small(ExperimentId::CircularLaw, {10}, 1);
    c.shift = ShiftPattern::univ_diag();
    CHECK_THROWS_AS(run_circular_law(c), ContractError);
  }
  SUBCASE("spectra kept on request") {
    const auto c = small(ExperimentId::CircularLaw, {10, 12}, 2);
    CHECK(run_circular_law(c).spectra.empty());
    const auto r = run_circular_law(c, {1, true});
    REQUIRE(r.spectra.size() == 4);
    CHECK(r.spectra[0].label == "n10_t0_sparse");
    CHECK(r.spectra[3].esd.n() == 12);
  }
}

TEST_CASE("reproducibility across worker counts") {
  for (auto id : {ExperimentId::CircularLaw, ExperimentId::LogdetConvergence, ExperimentId::SparseLln,
                  ExperimentId::DistanceConcentration}) {
    auto c = small(id, {16, 32}, 5);
    c.d_fraction = 0.25;
    c.enforce_subspace_range = false;
    const auto ref = format_report(run_experiment(c, {1, false}));
    for (std::size_t w : {2, 3, 8}) CHECK(format_report(run_experiment(c, {w, false})) == ref);
    c.master_seed = 2;
    CHECK(format_report(run_experiment(c, {1, false})) != ref);
  }
}

TEST_CASE("universality runner") {
  auto c = small(ExperimentId::Universality, {24}, 2);
  c.alpha = 0.5;
  c.reference_atom = Atom::RealGaussian;
  c.shift = ShiftPattern::univ_diag();
  const auto r = run_universality(c);
  CHECK(r.records.size() == 2);
  for (std::size_t k = 0; k < 9; ++k)
    CHECK(r.summary_value(24, "median_test_function_gap_" + std::to_string(k)).has_value());
}

TEST_CASE("shifted outlier runner") {
  auto c = small(ExperimentId::ShiftedOutlier, {64}, 2);
  CHECK_THROWS_AS(run_shifted_outlier(c), ContractError);
  c.shift = ShiftPattern::outlier_diag();
  const auto r = run_shifted_outlier(c);
  REQUIRE(r.flag("outlier-band") != nullptr);
  for (const auto& rec : r.records) {
    const double k = *rec.get("outliers");
    CHECK(k + *rec.get("bulk_size") <= 64);
  }
}

TEST_CASE("log-determinant runner") {
  SUBCASE("shared seed at alpha = 1 gives exactly zero") {
    auto c = small(ExperimentId::LogdetConvergence, {20, 40}, 3);
    c.alpha = 1.0;
    c.shared_seed = true;
    const auto r = run_logdet_convergence(c);
    for (const auto& rec : r.records) {
      REQUIRE_FALSE(rec.exceptional);
      CHECK(*rec.get("difference") == 0.0);
    }
  }
  SUBCASE("cross-check between singular values and row distances") {
    auto c = small(ExperimentId::LogdetConvergence, {30}, 3);
    c.z_probe = Complex(1, 1);
    c.atom = Atom::RealGaussian;
    const auto r = run_logdet_convergence(c);
    CHECK(r.flag("crosscheck")->state == FlagState::Pass);
  }
}

TEST_CASE("distance concentration runner") {
  SUBCASE("coordinate distance") {
    const std::vector<Complex> row{3, 4, Complex(0, 3), 4};
    CHECK(coordinate_subspace_distance(row, 2) == 5.0);
    CHECK(coordinate_subspace_distance(row, 0) == doctest::Approx(std::sqrt(50.0)));
    CHECK(coordinate_subspace_distance(row, 4) == 0.0);
  }
  SUBCASE("vanishing c gives probability zero unless the tail is empty") {
    auto c = small(ExperimentId::DistanceConcentration, {400}, 200);
    c.c_probe = 1e-6;
    c.d_fraction = 0.25;
    const auto r = run_distance_concentration(c);
    for (const auto& rec : r.records) CHECK(*rec.get("below") == (*rec.get("distance") == 0.0 ? 1.0 : 0.0));
  }
}

TEST_CASE("least singular value runner") {
  auto c = small(ExperimentId::LeastSingular, {20, 40}, 4);
  c.atom = Atom::ComplexGaussian;
  c.alpha = 1.0;
  const auto r = run_least_singular(c);
  CHECK(r.flag("floor")->state == FlagState::Pass);
  CHECK(r.summary_value(40, "fitted_exponent").has_value());
  SUBCASE("detector sees a duplicate-row matrix") {
    auto a = ComplexMatrix::identity(6);
    for (std::size_t j = 0; j < 6; ++j) a(5, j) = a(4, j);
    CHECK(least_singular_value(a) <= 1e-12);
  }
}

TEST_CASE("sparse law of large numbers runner") {
  SUBCASE("alpha = 1 is the classical law") {
    auto c = small(ExperimentId::SparseLln, {10000}, 100);
    c.alpha = 1.0;
    const auto r = run_sparse_lln(c);
    CHECK(*r.summary_value(10000, "fraction_within") >= 0.99);
    CHECK(r.flag("within-fraction")->state == FlagState::Pass);
  }
  SUBCASE("a single draw carries no assertion") {
    const auto r = run_sparse_lln(small(ExperimentId::SparseLln, {1}, 1));
    CHECK(r.records.size() == 1);
    CHECK(r.flag("within-fraction") == nullptr);
  }
  SUBCASE("explicit m") {
    auto c = small(ExperimentId::SparseLln, {100}, 2);
    c.lln_m = 1000;
    CHECK(*run_sparse_lln(c).records[0].get("m") == 1000.0);
  }
}

TEST_CASE("truncated moment") {
  SUBCASE("Bernoulli is exactly zero for n >= 2") {
    for (std::size_t n : {2, 3, 50, 5000})
      for (double alpha : {0.1, 0.5, 0.9, 1.0})
        CHECK(truncated_moment_estimate(Atom::BernoulliPM1, make_sparse_params(alpha, n), SparseScaling::Mean,
                                        20000, SeedPath(1)) == 0.0);
  }
  SUBCASE("Gaussian matches the closed form E|x| 1{|x| > n^(alpha/2)}") {
    // For the half-normal, E|x| 1{|x| > t} = sqrt(2/pi) exp(-t^2/2).
    for (std::size_t n : {100, 1000, 10000}) {
      const auto p = make_sparse_params(0.5, n);
      const double t = std::pow(static_cast<double>(n), 0.25);
      const double exact = std::sqrt(2 / std::numbers::pi) * std::exp(-t * t / 2);
      const double est = truncated_moment_estimate(Atom::RealGaussian, p, SparseScaling::Mean, 1'000'000,
                                                   SeedPath(3, {n}));
      CAPTURE(n);
      CHECK(est == doctest::Approx(exact).epsilon(0.05));
    }
  }
  SUBCASE("complex Gaussian at alpha = 1 matches the Rayleigh tail") {
    // |x| has density 2r exp(-r^2): E|x| 1{|x| > t} = t exp(-t^2) + (sqrt(pi)/2) erfc(t).
    for (std::size_t n : {1, 2, 4}) {
      const double t = std::sqrt(static_cast<double>(n));
      const double exact = t * std::exp(-t * t) + std::sqrt(std::numbers::pi) / 2 * std::erfc(t);
      const double est = truncated_moment_estimate(Atom::ComplexGaussian, make_sparse_params(1.0, n),
                                                   SparseScaling::Mean, 200000, SeedPath(4, {n}));
      CHECK(est == doctest::Approx(exact).epsilon(0.02));
    }
  }
  SUBCASE("runner flags") {
    auto c = small(ExperimentId::TruncationDecay, {100, 1000, 10000}, 1);
    c.atom = Atom::RealGaussian;
    c.alpha = 0.5;
    c.draws = 200000;
    const auto r = run_truncation_decay(c);
    CHECK(r.flag("strictly-decreasing")->state == FlagState::Pass);
    CHECK(r.flag("non-increasing")->state == FlagState::Pass);
    auto b = c;
    b.atom = Atom::BernoulliPM1;
    const auto rb = run_truncation_decay(b);
    CHECK(rb.flag("exactly-zero")->state == FlagState::Pass);
    CHECK(rb.flag("strictly-decreasing") == nullptr);
  }
}

TEST_CASE("covariance runner") {
  CHECK(covariance_distance(ComplexMatrix(5, 5), ComplexMatrix(5, 5)) == 0.0);
  auto c = small(ExperimentId::CovarianceUniversality, {20, 30}, 2);
  CHECK_THROWS_AS(run_covariance_universality(c), ContractError);
  c.atom = Atom::ComplexBernoulli;
  c.reference_atom = Atom::ComplexGaussian;
  c.alpha = 0.5;
  const auto r = run_covariance_universality(c);
  CHECK(r.flag("pm-symmetry")->state == FlagState::Pass);
  CHECK(r.flag("pm-symmetry")->criterion == "AC3");
  for (const auto& rec : r.records) CHECK(*rec.get("pm_deviation") <= 1e-8);
}

TEST_CASE("rate study runner") {
  auto c = small(ExperimentId::RateStudy, {30}, 1);
  c.reference_atom = Atom::RealGaussian;
  const auto r = run_rate_study(c);
  CHECK(r.summary.size() == 1);
  CHECK(r.summary_value(30, "median_radial_ks_first").has_value());
  CHECK(r.summary_value(30, "median_radial_ks_second").has_value());
  CHECK(r.flags.empty());
  CHECK(r.passed());
  CHECK(r.config.effective_alpha() == 0.2);
}
