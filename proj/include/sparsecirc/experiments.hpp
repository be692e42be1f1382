#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsecirc/ensembles.hpp"
#include "sparsecirc/esd.hpp"

namespace sparsecirc {

enum class ExperimentId {
  CircularLaw,
  Universality,
  ShiftedOutlier,
  LogdetConvergence,
  DistanceConcentration,
  LeastSingular,
  SparseLln,
  TruncationDecay,
  CovarianceUniversality,
  RateStudy,
};

struct ExperimentInfo {
  ExperimentId id;
  std::string_view name;
  /// Theorem, lemma or figure the experiment reproduces.
  std::string_view anchor;
  std::string_view description;
};

const std::array<ExperimentInfo, 10>& experiment_catalog();
std::string_view experiment_name(ExperimentId id);
std::optional<ExperimentId> parse_experiment(std::string_view name);

struct RunConfig {
  ExperimentId experiment = ExperimentId::CircularLaw;
  Atom atom = Atom::BernoulliPM1;
  /// Atom of the non-sparse (or second) side; defaults to `atom`.
  std::optional<Atom> reference_atom;
  /// Defaults to 0.2 for the rate study and 0.4 otherwise.
  std::optional<double> alpha;
  std::vector<std::size_t> n_values;
  std::size_t trials = 5;
  ShiftPattern shift;
  std::uint64_t master_seed = 1;
  Complex z_probe = 0.0;
  double c_probe = 0.5;
  double d_fraction = 0.5;
  double epsilon = 0.1;
  /// Sample size of the law-of-large-numbers experiment; 0 means m = n.
  std::size_t lln_m = 0;
  /// Monte-Carlo draws of the truncated-moment estimate.
  std::size_t draws = 1'000'000;
  /// Defaults to Mean for truncation-decay and Ensemble otherwise.
  std::optional<SparseScaling> scaling;
  /// Log-det experiment only: draw both sides from one seed path.
  bool shared_seed = false;
  /// Regression ceiling for the final median discrepancy.
  std::optional<double> baseline;
  /// Distance experiment: reject d > n - n^(1 - alpha/6).
  bool enforce_subspace_range = true;

  double effective_alpha() const;
  Atom effective_reference_atom() const;
  SparseScaling effective_scaling() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Range checks shared by the parser and the runners. Throws ConfigError.
void validate(const RunConfig& cfg);

struct RunOptions {
  std::size_t workers = 1;
  /// Keep every sampled ESD in the report (for CSV export).
  bool keep_spectra = false;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct Record {
  std::size_t n = 0;
  std::size_t trial = 0;
  bool exceptional = false;
  std::string note;
  NamedValues values;

  std::optional<double> get(std::string_view key) const;
};

struct SummaryRow {
  std::size_t n = 0;
  NamedValues values;

  std::optional<double> get(std::string_view key) const;
};

enum class FlagState { Pass, Fail };

struct Flag {
  std::string id;
  /// Acceptance criterion the flag reports on.
  std::string criterion;
  FlagState state = FlagState::Fail;
  std::string detail;
};

struct LabeledSpectrum {
  std::string label;
  Esd esd;
};

struct RunReport {
  RunConfig config;
  std::string version;
  std::vector<Record> records;
  std::vector<SummaryRow> summary;
  std::vector<Flag> flags;
  std::size_t exceptions = 0;
  std::vector<LabeledSpectrum> spectra;

  bool passed() const;
  const Flag* flag(std::string_view id) const;
  std::optional<double> summary_value(std::size_t n, std::string_view key) const;
  /// Summary values of `key` along n_values.
  std::vector<double> summary_series(std::string_view key) const;
};

inline constexpr std::string_view kVersion = "sparsecirc 1.0.0";

RunReport run_experiment(const RunConfig& cfg, const RunOptions& options = {});

RunReport run_circular_law(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_universality(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_shifted_outlier(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_logdet_convergence(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_distance_concentration(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_least_singular(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_sparse_lln(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_truncation_decay(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_covariance_universality(const RunConfig& cfg, const RunOptions& options = {});
RunReport run_rate_study(const RunConfig& cfg, const RunOptions& options = {});

// Building blocks, exposed for testing.

/// Median of the finite entries; NaN when there are none.
double median(std::vector<double> values);
bool strictly_decreasing(std::span<const double> values);
bool non_increasing(std::span<const double> values);

/// Largest d allowed by the distance-concentration range, n - n^(1 - alpha/6).
double max_subspace_dimension(std::size_t n, double alpha);

/// dist(X, span{e_1..e_d}) for a row X.
double coordinate_subspace_distance(std::span<const Complex> row, std::size_t d);

/// Monte-Carlo estimate of E|X 1{|X| > n^(1 - alpha/2)}| for the sparse
/// variable X = I_rho * x * scale. Atoms whose modulus has a density use
/// importance sampling on the tail; the Bernoulli kinds are sampled directly.
double truncated_moment_estimate(Atom atom, const SparseParams& params, SparseScaling scaling,
                                 std::size_t draws, const SeedPath& seed);

/// Pairs check: ascending Hermitian spectrum of dirac_block(a) against
/// {+/- sigma_i(a / sqrt(n))}; returns the largest deviation.
double dirac_pm_deviation(const ComplexMatrix& a, std::span<const double> dirac_spectrum);

/// Real-line KS distance between the Dirac-block spectra of two matrices.
double covariance_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Slope-based exponent C of the floor sigma_n >= n^(-C), fitted by least
/// squares of log(min sigma) on log n. std::nullopt with fewer than two
/// usable points.
std::optional<double> fitted_floor_exponent(std::span<const std::size_t> ns,
                                            std::span<const double> minima);

}  // namespace sparsecirc
