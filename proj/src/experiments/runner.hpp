#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "sparsecirc/experiments.hpp"

namespace sparsecirc::detail {

struct UnitContext {
  std::size_t n = 0;
  std::size_t trial = 0;
  /// (master, experiment, n, trial); sides branch off with child(side).
  SeedPath seed{0};
};

struct UnitResult {
  Record record;
  std::vector<LabeledSpectrum> spectra;
};

using UnitFn = std::function<void(const UnitContext&, UnitResult&)>;

/// Runs f over every (n, trial) pair on `workers` threads and returns the
/// results in (n, trial) order. A ConvergenceError thrown by f marks the
/// record exceptional; any other exception propagates (lowest unit first).
std::vector<UnitResult> run_units(const RunConfig& cfg, std::size_t workers, const UnitFn& f);

/// Report skeleton: config echo, version, records, spectra, exception count.
RunReport assemble(const RunConfig& cfg, std::vector<UnitResult> units, bool keep_spectra);

/// Values of `key` over the non-exceptional records of dimension n.
std::vector<double> collect(const RunReport& r, std::size_t n, const std::string& key);

SummaryRow& summary_row(RunReport& r, std::size_t n);

void add_flag(RunReport& r, std::string id, std::string criterion, bool pass, std::string detail);

/// Strict decrease of the per-n summary `key`; absent for a single-n sweep.
void add_decay_flag(RunReport& r, const std::string& key, const std::string& criterion);

/// Final summary `key` below cfg.baseline, when a baseline is configured.
void add_baseline_flag(RunReport& r, const std::string& key, const std::string& criterion);

/// Exceptional trials above 5% of all trials fail the run.
void add_exception_flag(RunReport& r, const std::string& criterion);

std::string format_number(double v);

/// Square lattice wide enough for the scaled shift values plus the disk.
Lattice lattice_for(const ShiftPattern& shift, std::size_t n);

}  // namespace sparsecirc::detail
