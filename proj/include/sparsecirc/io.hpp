#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "sparsecirc/esd.hpp"
#include "sparsecirc/experiments.hpp"

namespace sparsecirc {

struct OutputSettings {
  /// Directory for the report and CSV sidecars; relative to the working directory.
  std::string directory = "out";
  /// Write one eigenvalue CSV per sampled matrix.
  bool spectra = false;

  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct ConfigDocument {
  RunConfig run;
  OutputSettings output;
};

/// Config grammar, one item per line:
///
///   # comment
///   [ensemble] | [experiment] | [output]
///   key = value
///
/// Keys may also appear before the first section. Unknown, duplicate or
/// misplaced keys and out-of-range values throw ConfigError with the line.
/// n_values is required.
ConfigDocument parse_config_document(std::string_view text);
RunConfig parse_config(std::string_view text);
/// Reads and parses a file; IoError when it cannot be read.
ConfigDocument load_config(const std::filesystem::path& path);

/// Canonical text that parses back to the same document.
std::string format_config(const RunConfig& cfg, const OutputSettings& output = {});

/// Line-oriented report: provenance lines, then one line per record,
/// summary row and flag, each a list of key=value fields.
std::string format_report(const RunReport& report);
void write_report(const RunReport& report, const std::filesystem::path& path);

/// "re,im" header, then one row per point sorted by (Re, Im), 17 significant
/// digits with a bare exponent (1.0000000000000000e0).
std::string format_eigenvalues_csv(const Esd& e);
void write_eigenvalues_csv(const Esd& e, const std::filesystem::path& path);
/// Inverse of format_eigenvalues_csv; ParseError on malformed input.
Esd parse_eigenvalues_csv(std::string_view text);
Esd read_eigenvalues_csv(const std::filesystem::path& path);

/// 17-significant-digit scientific notation with a bare exponent.
std::string format_scientific(double v);

struct FigureSpec {
  std::filesystem::path source;
  double x_lo = -1.5, x_hi = 1.5;
  double y_lo = -1.5, y_hi = 1.5;
  double marker_size = 1.5;
  bool overlay = false;
  std::string title;
  /// Written by the CLI; empty means standard output.
  std::filesystem::path output;
};

/// Same `key = value` grammar as configs, without sections. A relative
/// source or output path is resolved against `base`.
FigureSpec parse_figure_spec(std::string_view text, const std::filesystem::path& base = {});

/// SVG 1.1 scatter of the source CSV: one circle per point in (Re, Im)
/// order, plus an optional unit circle. Byte-identical for identical input.
std::string render_scatter_svg(const FigureSpec& spec);
std::string render_scatter_svg(const FigureSpec& spec, const Esd& e);

/// Fraction of points with modulus above `radius`.
double fraction_outside(const Esd& e, double radius);

}  // namespace sparsecirc
