#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "sparsecirc/errors.hpp"

namespace sparsecirc {

namespace {

constexpr std::array<ExperimentInfo, 10> kCatalog{{
    {ExperimentId::CircularLaw, "circular-law", "theorem: sparse circular law; figure: sparse and non-sparse disks",
     "ESD of a sparse matrix against the uniform disk"},
    {ExperimentId::Universality, "universality", "theorem: sparse universality; figure: shifted universality",
     "sparse against non-sparse ESD with a common shift"},
    {ExperimentId::ShiftedOutlier, "shifted-outlier", "theorem: shifted sparse circular law; figure: outlier cluster",
     "outlier cluster at 2 from a rank-sqrt(n) shift"},
    {ExperimentId::LogdetConvergence, "logdet-convergence", "proposition: log-determinant convergence",
     "normalized log-determinant gap at a probe point"},
    {ExperimentId::DistanceConcentration, "distance-concentration", "proposition: distance to a subspace",
     "distance of a sparse row to a coordinate subspace"},
    {ExperimentId::LeastSingular, "least-singular", "lemma: least singular value bound",
     "polynomial floor of the least singular value"},
    {ExperimentId::SparseLln, "sparse-lln", "lemma: sparse law of large numbers",
     "weak law of large numbers for sparse variables"},
    {ExperimentId::TruncationDecay, "truncation-decay", "lemma: truncated moment decay",
     "truncated first moment of the sparse variable"},
    {ExperimentId::CovarianceUniversality, "covariance-universality", "lemma: covariance ESD universality",
     "Dirac-block spectra of sparse and non-sparse matrices"},
    {ExperimentId::RateStudy, "rate-study", "figure: convergence rate of two atoms",
     "disk discrepancy of two atoms side by side"},
}};

}  // namespace

const std::array<ExperimentInfo, 10>& experiment_catalog() { return kCatalog; }

std::string_view experiment_name(ExperimentId id) {
  return kCatalog[static_cast<std::size_t>(id)].name;
}

std::optional<ExperimentId> parse_experiment(std::string_view name) {
  for (const auto& e : kCatalog)
    if (e.name == name) return e.id;
  return std::nullopt;
}

double RunConfig::effective_alpha() const {
  if (alpha) return *alpha;
  return experiment == ExperimentId::RateStudy ? 0.2 : 0.4;
}

Atom RunConfig::effective_reference_atom() const { return reference_atom.value_or(atom); }

SparseScaling RunConfig::effective_scaling() const {
  if (scaling) return *scaling;
  return experiment == ExperimentId::SparseLln || experiment == ExperimentId::TruncationDecay
             ? SparseScaling::Mean
             : SparseScaling::Ensemble;
}

double max_subspace_dimension(std::size_t n, double alpha) {
  const double nd = static_cast<double>(n);
  return nd - std::pow(nd, 1.0 - alpha / 6.0);
}

void validate(const RunConfig& cfg) {
  const double alpha = cfg.effective_alpha();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError(0, "alpha must lie in (0, 1]");
  if (cfg.trials < 1) throw ConfigError(0, "trials must be at least 1");
  if (cfg.n_values.empty()) throw ConfigError(0, "n_values must not be empty");
  for (std::size_t k = 0; k < cfg.n_values.size(); ++k) {
    if (cfg.n_values[k] < 1) throw ConfigError(0, "n_values entries must be positive");
    if (k > 0 && cfg.n_values[k] <= cfg.n_values[k - 1])
      throw ConfigError(0, "n_values must be strictly increasing");
  }
  if (!(std::isfinite(cfg.z_probe.real()) && std::isfinite(cfg.z_probe.imag())) ||
      std::abs(cfg.z_probe) > 3.0)
    throw ConfigError(0, "z_probe must satisfy |z| <= 3");
  if (!(cfg.c_probe > 0.0 && cfg.c_probe < 1.0)) throw ConfigError(0, "c_probe must lie in (0, 1)");
  if (!(cfg.d_fraction > 0.0 && cfg.d_fraction < 1.0))
    throw ConfigError(0, "d_fraction must lie in (0, 1)");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    throw ConfigError(0, "epsilon must be positive");
  if (cfg.draws < 1) throw ConfigError(0, "draws must be at least 1");
  if (cfg.baseline && !(std::isfinite(*cfg.baseline) && *cfg.baseline > 0.0))
    throw ConfigError(0, "baseline must be positive");
  for (const auto& v : cfg.shift.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ConfigError(0, "shift values must be finite");

  if (cfg.experiment == ExperimentId::DistanceConcentration) {
    for (auto n : cfg.n_values) {
      const auto d = static_cast<std::size_t>(std::floor(cfg.d_fraction * static_cast<double>(n)));
      if (d < 1 || d >= n)
        throw ConfigError(0, "d_fraction * n must give 1 <= d < n for n = " + std::to_string(n));
      if (cfg.enforce_subspace_range && static_cast<double>(d) > max_subspace_dimension(n, alpha))
        throw ConfigError(0, "d = " + std::to_string(d) + " exceeds n - n^(1 - alpha/6) for n = " +
                                 std::to_string(n));
    }
  }
  if (cfg.experiment == ExperimentId::SparseLln && cfg.lln_m != 0)
    for (auto n : cfg.n_values)
      if (cfg.lln_m < n) throw ConfigError(0, "lln_m must be at least every n");
}

namespace {

std::optional<double> lookup(const NamedValues& v, std::string_view key) {
  for (const auto& [k, x] : v)
    if (k == key) return x;
  return std::nullopt;
}

}  // namespace

std::optional<double> Record::get(std::string_view key) const { return lookup(values, key); }
std::optional<double> SummaryRow::get(std::string_view key) const { return lookup(values, key); }

bool RunReport::passed() const {
  return std::all_of(flags.begin(), flags.end(),
                     [](const Flag& f) { return f.state == FlagState::Pass; });
}

const Flag* RunReport::flag(std::string_view id) const {
  for (const auto& f : flags)
    if (f.id == id) return &f;
  return nullptr;
}

std::optional<double> RunReport::summary_value(std::size_t n, std::string_view key) const {
  for (const auto& row : summary)
    if (row.n == n) return row.get(key);
  return std::nullopt;
}

std::vector<double> RunReport::summary_series(std::string_view key) const {
  std::vector<double> s;
  for (auto n : config.n_values)
    s.push_back(summary_value(n, key).value_or(std::numeric_limits<double>::quiet_NaN()));
  return s;
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

bool strictly_decreasing(std::span<const double> values) {
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] < values[k - 1])) return false;
  return true;
}

bool non_increasing(std::span<const double> values) {
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] <= values[k - 1])) return false;
  return true;
}

namespace detail {

std::vector<UnitResult> run_units(const RunConfig& cfg, std::size_t workers, const UnitFn& f) {
  std::vector<UnitContext> units;
  const auto exp_label = static_cast<std::uint64_t>(cfg.experiment);
  for (auto n : cfg.n_values)
    for (std::size_t t = 0; t < cfg.trials; ++t)
      units.push_back({n, t, SeedPath(cfg.master_seed, {exp_label, n, t})});

  std::vector<UnitResult> results(units.size());
  std::vector<std::exception_ptr> errors(units.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < units.size();) {
      auto& res = results[k];
      res.record.n = units[k].n;
      res.record.trial = units[k].trial;
      try {
        f(units[k], res);
      } catch (const ConvergenceError& e) {
        res.record.exceptional = true;
        res.record.note = e.what();
        res.spectra.clear();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(units.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

RunReport assemble(const RunConfig& cfg, std::vector<UnitResult> units, bool keep_spectra) {
  RunReport r;
  r.config = cfg;
  r.version = std::string(kVersion);
  for (auto& u : units) {
    if (u.record.exceptional) ++r.exceptions;
    r.records.push_back(std::move(u.record));
    if (keep_spectra)
      for (auto& s : u.spectra) r.spectra.push_back(std::move(s));
  }
  for (auto n : cfg.n_values) r.summary.push_back({n, {}});
  return r;
}

std::vector<double> collect(const RunReport& r, std::size_t n, const std::string& key) {
  std::vector<double> v;
  for (const auto& rec : r.records)
    if (rec.n == n && !rec.exceptional)
      if (auto x = rec.get(key)) v.push_back(*x);
  return v;
}

SummaryRow& summary_row(RunReport& r, std::size_t n) {
  for (auto& row : r.summary)
    if (row.n == n) return row;
  r.summary.push_back({n, {}});
  return r.summary.back();
}

void add_flag(RunReport& r, std::string id, std::string criterion, bool pass, std::string detail) {
  r.flags.push_back(
      {std::move(id), std::move(criterion), pass ? FlagState::Pass : FlagState::Fail, std::move(detail)});
}

void add_decay_flag(RunReport& r, const std::string& key, const std::string& criterion) {
  if (r.config.n_values.size() < 2) return;
  const auto s = r.summary_series(key);
  std::string detail = key + ":";
  for (double v : s) detail += " " + format_number(v);
  add_flag(r, "monotone-decay", criterion, strictly_decreasing(s), detail);
}

void add_baseline_flag(RunReport& r, const std::string& key, const std::string& criterion) {
  if (!r.config.baseline) return;
  const double last = r.summary_value(r.config.n_values.back(), key)
                          .value_or(std::numeric_limits<double>::quiet_NaN());
  add_flag(r, "below-baseline", criterion, last < *r.config.baseline,
           key + " " + format_number(last) + " vs baseline " + format_number(*r.config.baseline));
}

void add_exception_flag(RunReport& r, const std::string& criterion) {
  const double total = static_cast<double>(r.records.size());
  const bool ok = static_cast<double>(r.exceptions) <= 0.05 * total;
  add_flag(r, "exceptions", criterion, ok,
           std::to_string(r.exceptions) + " of " + std::to_string(r.records.size()) + " trials");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Lattice lattice_for(const ShiftPattern& shift, std::size_t n) {
  double reach = 0.0;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (const auto& v : shift_diagonal(shift, n))
    reach = std::max({reach, std::abs(v.real() * s), std::abs(v.imag() * s)});
  Lattice l;
  l.lo = -1.5 - reach;
  l.hi = 1.5 + reach;
  return l;
}

}  // namespace detail

}  // namespace sparsecirc
