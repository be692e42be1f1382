#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "runner.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/linalg.hpp"

namespace sparsecirc {

using detail::UnitContext;
using detail::UnitResult;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Side : std::uint64_t { kSparseSide = 0, kReferenceSide = 1 };

EnsembleSpec sparse_spec(const RunConfig& cfg, Atom atom, std::size_t n) {
  return {atom, make_sparse_params(cfg.effective_alpha(), static_cast<long long>(n)), cfg.shift, true};
}

EnsembleSpec dense_spec(const RunConfig& cfg, Atom atom, std::size_t n) {
  return {atom, make_sparse_params(1.0, static_cast<long long>(n)), cfg.shift, false};
}

std::string spectrum_label(const UnitContext& u, std::string_view side) {
  return "n" + std::to_string(u.n) + "_t" + std::to_string(u.trial) + "_" + std::string(side);
}

Esd keep(UnitResult& res, const UnitContext& u, std::string_view side, Esd e) {
  res.spectra.push_back({spectrum_label(u, side), e});
  return e;
}

void put(UnitResult& res, std::string key, double v) { res.record.values.emplace_back(std::move(key), v); }

void put_medians(RunReport& r, std::initializer_list<std::string> keys) {
  for (auto n : r.config.n_values) {
    auto& row = detail::summary_row(r, n);
    for (const auto& k : keys) row.values.emplace_back("median_" + k, median(detail::collect(r, n, k)));
  }
}

RunReport finish(const RunConfig& cfg, const RunOptions& options, const detail::UnitFn& f) {
  validate(cfg);
  return detail::assemble(cfg, detail::run_units(cfg, options.workers, f), options.keep_spectra);
}

void require(bool ok, const char* what) {
  if (!ok) throw ContractError(what);
}

std::vector<double> sorted_pm(std::vector<double> sigma) {
  std::vector<double> pm;
  pm.reserve(2 * sigma.size());
  for (double s : sigma) {
    pm.push_back(s);
    pm.push_back(-s);
  }
  std::sort(pm.begin(), pm.end());
  return pm;
}

ComplexMatrix scaled(ComplexMatrix a) {
  if (a.rows() > 0) a *= Complex(1.0 / std::sqrt(static_cast<double>(a.rows())), 0.0);
  return a;
}

}  // namespace

RunReport run_circular_law(const RunConfig& cfg, const RunOptions& options) {
  require(cfg.shift.kind == ShiftKind::Zero, "circular-law requires the zero shift");
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto a = sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide));
    const auto e = keep(res, u, "sparse", esd_from_matrix(a));
    const auto d = compare_to_disk(e);
    put(res, "radial_ks", d.radial_ks);
    put(res, "kolmogorov", d.kolmogorov);
    put(res, "second_moment", second_moment(e));
    put(res, "max_test_function_gap", d.max_test_function_gap());
  });
  put_medians(r, {"radial_ks", "kolmogorov", "second_moment", "max_test_function_gap"});
  detail::add_decay_flag(r, "median_radial_ks", "AC4");
  detail::add_baseline_flag(r, "median_radial_ks", "AC4");
  detail::add_exception_flag(r, "AC4");
  return r;
}

RunReport run_universality(const RunConfig& cfg, const RunOptions& options) {
  const auto tests = canonical_test_functions();
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto a = sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide));
    const auto b = sample_matrix(dense_spec(cfg, cfg.effective_reference_atom(), u.n),
                                 u.seed.child(kReferenceSide));
    const auto ea = keep(res, u, "sparse", esd_from_matrix(a));
    const auto eb = keep(res, u, "dense", esd_from_matrix(b));
    const auto d = compare(ea, eb, detail::lattice_for(cfg.shift, u.n));
    put(res, "kolmogorov", d.kolmogorov);
    put(res, "radial_ks", d.radial_ks);
    put(res, "second_moment_gap", d.second_moment_gap);
    for (std::size_t k = 0; k < d.test_function_gaps.size(); ++k)
      put(res, "test_function_gap_" + std::to_string(k), d.test_function_gaps[k]);
  });
  put_medians(r, {"kolmogorov", "radial_ks", "second_moment_gap"});
  for (auto n : cfg.n_values) {
    auto& row = detail::summary_row(r, n);
    for (std::size_t k = 0; k < tests.size(); ++k) {
      const auto key = "test_function_gap_" + std::to_string(k);
      row.values.emplace_back("median_" + key, median(detail::collect(r, n, key)));
    }
  }
  detail::add_decay_flag(r, "median_kolmogorov", "AC5");
  detail::add_baseline_flag(r, "median_kolmogorov", "AC5");
  detail::add_exception_flag(r, "AC5");
  return r;
}

RunReport run_shifted_outlier(const RunConfig& cfg, const RunOptions& options) {
  require(cfg.shift.kind == ShiftKind::OutlierDiag, "shifted-outlier requires the outlier-diag shift");
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto a = sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide));
    const auto e = keep(res, u, "sparse", esd_from_matrix(a));
    std::size_t outliers = 0;
    std::vector<Complex> bulk;
    for (const auto& p : e.points()) {
      const double dist = std::abs(p - Complex(2.0, 0.0));
      if (dist <= 0.3) ++outliers;
      if (dist > 0.5) bulk.push_back(p);
    }
    put(res, "outliers", static_cast<double>(outliers));
    put(res, "bulk_size", static_cast<double>(bulk.size()));
    if (bulk.empty()) {
      put(res, "bulk_kolmogorov", kNaN);
      put(res, "bulk_radial_ks", kNaN);
    } else {
      const Esd be(std::move(bulk));
      put(res, "bulk_kolmogorov", kolmogorov_discrepancy(be, detail::lattice_for(cfg.shift, u.n)));
      put(res, "bulk_radial_ks", radial_ks(be));
    }
  });
  put_medians(r, {"outliers", "bulk_kolmogorov", "bulk_radial_ks"});
  bool in_band = true;
  std::string detail;
  for (auto n : cfg.n_values) {
    const auto counts = detail::collect(r, n, "outliers");
    const double root = std::floor(std::sqrt(static_cast<double>(n)));
    const double lo = root / 2.0, hi = 2.0 * root;
    auto& row = detail::summary_row(r, n);
    const double mn = counts.empty() ? kNaN : *std::min_element(counts.begin(), counts.end());
    const double mx = counts.empty() ? kNaN : *std::max_element(counts.begin(), counts.end());
    row.values.emplace_back("min_outliers", mn);
    row.values.emplace_back("max_outliers", mx);
    in_band = in_band && !counts.empty() && mn >= lo && mx <= hi;
    detail += "n=" + std::to_string(n) + " [" + detail::format_number(mn) + ", " +
              detail::format_number(mx) + "] in [" + detail::format_number(lo) + ", " +
              detail::format_number(hi) + "] ";
  }
  detail::add_flag(r, "outlier-band", "AC6", in_band, detail);
  detail::add_exception_flag(r, "AC6");
  return r;
}

RunReport run_logdet_convergence(const RunConfig& cfg, const RunOptions& options) {
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto ref_seed = u.seed.child(cfg.shared_seed ? kSparseSide : kReferenceSide);
    auto a = scaled(sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide)));
    auto b = scaled(sample_matrix(dense_spec(cfg, cfg.effective_reference_atom(), u.n), ref_seed));
    a.shift_diagonal(cfg.z_probe);
    b.shift_diagonal(cfg.z_probe);
    const double nd = static_cast<double>(u.n);
    const double la = log_abs_det(a, DetMethod::Singular) / nd;
    const double lb = log_abs_det(b, DetMethod::Singular) / nd;
    const double ra = log_abs_det(a, DetMethod::RowDist) / nd;
    const double rb = log_abs_det(b, DetMethod::RowDist) / nd;
    if (!std::isfinite(la) || !std::isfinite(lb) || !std::isfinite(ra) || !std::isfinite(rb)) {
      res.record.exceptional = true;
      res.record.note = "singular matrix: log-determinant is -infinity";
      return;
    }
    put(res, "logdet_sparse", la);
    put(res, "logdet_dense", lb);
    put(res, "difference", la - lb);
    put(res, "abs_difference", std::abs(la - lb));
    put(res, "crosscheck_gap", std::max(std::abs(la - ra), std::abs(lb - rb)));
  });
  put_medians(r, {"abs_difference"});
  double worst = 0.0;
  for (const auto& rec : r.records)
    if (auto g = rec.get("crosscheck_gap")) worst = std::max(worst, *g);
  for (auto& row : r.summary) {
    const auto gaps = detail::collect(r, row.n, "crosscheck_gap");
    row.values.emplace_back("max_crosscheck_gap",
                            gaps.empty() ? kNaN : *std::max_element(gaps.begin(), gaps.end()));
  }
  detail::add_flag(r, "crosscheck", "AC7", worst <= 1e-4,
                   "max singular/row-distance gap " + detail::format_number(worst));
  detail::add_decay_flag(r, "median_abs_difference", "AC7");
  detail::add_baseline_flag(r, "median_abs_difference", "AC7");
  detail::add_exception_flag(r, "AC7");
  return r;
}

double coordinate_subspace_distance(std::span<const Complex> row, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = d; k < row.size(); ++k) s += std::norm(row[k]);
  return std::sqrt(s);
}

RunReport run_distance_concentration(const RunConfig& cfg, const RunOptions& options) {
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto params = make_sparse_params(cfg.effective_alpha(), static_cast<long long>(u.n));
    const auto d = static_cast<std::size_t>(std::floor(cfg.d_fraction * static_cast<double>(u.n)));
    const auto shift = shift_diagonal(cfg.shift, u.n);
    const auto seed = u.seed.child(kSparseSide);
    std::vector<Complex> row(u.n);
    for (std::size_t j = 0; j < u.n; ++j) row[j] = sample_entry(cfg.atom, params, seed.stream(0, j));
    row[0] += shift[0];
    const double dist = coordinate_subspace_distance(row, d);
    const double bound = cfg.c_probe * std::sqrt(static_cast<double>(u.n - d));
    put(res, "d", static_cast<double>(d));
    put(res, "distance", dist);
    put(res, "below", dist <= bound ? 1.0 : 0.0);
  });
  bool ok = true;
  std::string detail;
  for (auto n : cfg.n_values) {
    const auto below = detail::collect(r, n, "below");
    const double p = below.empty()
                         ? kNaN
                         : std::accumulate(below.begin(), below.end(), 0.0) /
                               static_cast<double>(below.size());
    auto& row = detail::summary_row(r, n);
    row.values.emplace_back("probability", p);
    row.values.emplace_back("median_distance", median(detail::collect(r, n, "distance")));
    ok = ok && p <= 0.01;
    detail += "n=" + std::to_string(n) + " p=" + detail::format_number(p) + " ";
  }
  detail::add_flag(r, "small-probability", "AC8", ok, detail + "(limit 0.01)");
  return r;
}

std::optional<double> fitted_floor_exponent(std::span<const std::size_t> ns,
                                            std::span<const double> minima) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < ns.size() && k < minima.size(); ++k)
    if (minima[k] > 0.0 && std::isfinite(minima[k])) {
      x.push_back(std::log(static_cast<double>(ns[k])));
      y.push_back(std::log(minima[k]));
    }
  if (x.size() < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return -sxy / sxx;
}

RunReport run_least_singular(const RunConfig& cfg, const RunOptions& options) {
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto a = sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide));
    put(res, "sigma_min", least_singular_value(a));
  });
  std::vector<double> minima;
  for (auto n : cfg.n_values) {
    const auto s = detail::collect(r, n, "sigma_min");
    const double mn = s.empty() ? kNaN : *std::min_element(s.begin(), s.end());
    minima.push_back(mn);
    auto& row = detail::summary_row(r, n);
    row.values.emplace_back("min_sigma_min", mn);
    row.values.emplace_back("median_sigma_min", median(s));
  }
  if (auto c = fitted_floor_exponent(cfg.n_values, minima)) {
    for (auto& row : r.summary) row.values.emplace_back("fitted_exponent", *c);
  }
  const double overall = minima.empty() ? kNaN : *std::min_element(minima.begin(), minima.end());
  detail::add_flag(r, "floor", "AC11", overall > 1e-10,
                   "min sigma_n " + detail::format_number(overall) + " (floor 1e-10)");
  detail::add_exception_flag(r, "AC11");
  return r;
}

RunReport run_sparse_lln(const RunConfig& cfg, const RunOptions& options) {
  const auto scaling = cfg.effective_scaling();
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto params = make_sparse_params(cfg.effective_alpha(), static_cast<long long>(u.n));
    const std::size_t m = cfg.lln_m == 0 ? u.n : cfg.lln_m;
    const auto seed = u.seed.child(kSparseSide);
    Complex sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) sum += sample_entry(cfg.atom, params, seed.stream(0, k), scaling);
    // Every built-in atom has mean zero.
    const double dev = std::abs(sum / static_cast<double>(m));
    put(res, "m", static_cast<double>(m));
    put(res, "abs_deviation", dev);
    put(res, "within", dev <= cfg.epsilon ? 1.0 : 0.0);
  });
  for (auto n : cfg.n_values) {
    const auto w = detail::collect(r, n, "within");
    auto& row = detail::summary_row(r, n);
    row.values.emplace_back("fraction_within",
                            w.empty() ? kNaN
                                      : std::accumulate(w.begin(), w.end(), 0.0) /
                                            static_cast<double>(w.size()));
    row.values.emplace_back("median_abs_deviation", median(detail::collect(r, n, "abs_deviation")));
  }
  // A single draw (n = 1) carries no law-of-large-numbers content.
  const auto last = cfg.n_values.back();
  if (last > 1) {
    const double f = r.summary_value(last, "fraction_within").value_or(kNaN);
    detail::add_flag(r, "within-fraction", "AC9", f >= 0.9,
                     "n=" + std::to_string(last) + " fraction " + detail::format_number(f) +
                         " within " + detail::format_number(cfg.epsilon) + " (need 0.9)");
  }
  return r;
}

double truncated_moment_estimate(Atom atom, const SparseParams& params, SparseScaling scaling,
                                 std::size_t draws, const SeedPath& seed) {
  const double n = static_cast<double>(params.n());
  const double rho = params.rho();
  const double threshold = std::pow(n, 1.0 - params.alpha() / 2.0);
  const double scale = rho == 1.0 ? 1.0 : (scaling == SparseScaling::Mean ? 1.0 / rho : 1.0 / std::sqrt(rho));
  const double t = threshold / scale;
  const bool has_density = modulus_density(atom, 1.0).has_value();
  const double lambda = std::max(t, 1.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const auto s = seed.stream(0, k);
    if (!has_density) {
      const double x = std::abs(sample_entry(atom, params, s, scaling));
      if (x > threshold) sum += x;
      continue;
    }
    if (!(s.uniform(0) < rho)) continue;
    // |x| drawn from t + Exp(lambda), reweighted by the true modulus density.
    const double r = t - std::log(s.uniform(1)) / lambda;
    const double q = lambda * std::exp(-lambda * (r - t));
    sum += scale * r * (*modulus_density(atom, r) / q);
  }
  return sum / static_cast<double>(draws);
}

RunReport run_truncation_decay(const RunConfig& cfg, const RunOptions& options) {
  const auto scaling = cfg.effective_scaling();
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto params = make_sparse_params(cfg.effective_alpha(), static_cast<long long>(u.n));
    put(res, "threshold", std::pow(static_cast<double>(u.n), 1.0 - params.alpha() / 2.0));
    put(res, "estimate",
        truncated_moment_estimate(cfg.atom, params, scaling, cfg.draws, u.seed.child(kSparseSide)));
  });
  put_medians(r, {"estimate"});
  if (cfg.n_values.size() >= 2) {
    const auto s = r.summary_series("median_estimate");
    std::string detail = "median_estimate:";
    for (double v : s) detail += " " + detail::format_number(v);
    detail::add_flag(r, "non-increasing", "AC10", non_increasing(s), detail);
    if (modulus_density(cfg.atom, 1.0))
      detail::add_flag(r, "strictly-decreasing", "AC10", strictly_decreasing(s), detail);
  }
  if (!modulus_density(cfg.atom, 1.0)) {
    bool zero = true;
    for (const auto& rec : r.records)
      if (rec.n >= 2 && rec.get("estimate").value_or(kNaN) != 0.0) zero = false;
    detail::add_flag(r, "exactly-zero", "AC10", zero, "estimates for n >= 2");
  }
  return r;
}

double dirac_pm_deviation(const ComplexMatrix& a, std::span<const double> dirac_spectrum) {
  const auto pm = sorted_pm(singular_values(scaled(a)).values);
  if (pm.size() != dirac_spectrum.size()) return std::numeric_limits<double>::infinity();
  std::vector<double> h(dirac_spectrum.begin(), dirac_spectrum.end());
  std::sort(h.begin(), h.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) worst = std::max(worst, std::abs(h[k] - pm[k]));
  return worst;
}

double covariance_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return real_line_ks(hermitian_eigen(dirac_block(a)), hermitian_eigen(dirac_block(b)));
}

RunReport run_covariance_universality(const RunConfig& cfg, const RunOptions& options) {
  require(cfg.effective_alpha() == 1.0 || is_complex(cfg.atom),
          "covariance-universality needs a complex atom when sparse");
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto a = sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide));
    const auto b = sample_matrix(dense_spec(cfg, cfg.effective_reference_atom(), u.n),
                                 u.seed.child(kReferenceSide));
    const auto ha = hermitian_eigen(dirac_block(a));
    const auto hb = hermitian_eigen(dirac_block(b));
    put(res, "kolmogorov", real_line_ks(ha, hb));
    put(res, "pm_deviation", std::max(dirac_pm_deviation(a, ha), dirac_pm_deviation(b, hb)));
  });
  put_medians(r, {"kolmogorov"});
  double worst = 0.0;
  for (const auto& rec : r.records)
    if (auto g = rec.get("pm_deviation")) worst = std::max(worst, *g);
  detail::add_flag(r, "pm-symmetry", "AC3", worst <= 1e-8,
                   "max deviation from +/- singular values " + detail::format_number(worst));
  detail::add_decay_flag(r, "median_kolmogorov", "covariance-decay");
  detail::add_exception_flag(r, "covariance-decay");
  return r;
}

RunReport run_rate_study(const RunConfig& cfg, const RunOptions& options) {
  auto r = finish(cfg, options, [&](const UnitContext& u, UnitResult& res) {
    const auto a = sample_matrix(sparse_spec(cfg, cfg.atom, u.n), u.seed.child(kSparseSide));
    const auto b = sample_matrix(sparse_spec(cfg, cfg.effective_reference_atom(), u.n),
                                 u.seed.child(kReferenceSide));
    const auto da = compare_to_disk(keep(res, u, "first", esd_from_matrix(a)));
    const auto db = compare_to_disk(keep(res, u, "second", esd_from_matrix(b)));
    put(res, "radial_ks_first", da.radial_ks);
    put(res, "kolmogorov_first", da.kolmogorov);
    put(res, "radial_ks_second", db.radial_ks);
    put(res, "kolmogorov_second", db.kolmogorov);
  });
  put_medians(r, {"radial_ks_first", "kolmogorov_first", "radial_ks_second", "kolmogorov_second"});
  return r;
}

RunReport run_experiment(const RunConfig& cfg, const RunOptions& options) {
  switch (cfg.experiment) {
    case ExperimentId::CircularLaw: return run_circular_law(cfg, options);
    case ExperimentId::Universality: return run_universality(cfg, options);
    case ExperimentId::ShiftedOutlier: return run_shifted_outlier(cfg, options);
    case ExperimentId::LogdetConvergence: return run_logdet_convergence(cfg, options);
    case ExperimentId::DistanceConcentration: return run_distance_concentration(cfg, options);
    case ExperimentId::LeastSingular: return run_least_singular(cfg, options);
    case ExperimentId::SparseLln: return run_sparse_lln(cfg, options);
    case ExperimentId::TruncationDecay: return run_truncation_decay(cfg, options);
    case ExperimentId::CovarianceUniversality: return run_covariance_universality(cfg, options);
    case ExperimentId::RateStudy: return run_rate_study(cfg, options);
  }
  throw ContractError("unknown experiment");
}

}  // namespace sparsecirc
