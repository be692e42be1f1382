#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "text.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/io.hpp"

namespace sparsecirc {

namespace {

using detail::trim;

double parse_real(std::string_view s, std::size_t line) {
  if (auto v = detail::to_double(s); v && std::isfinite(*v)) return *v;
  throw ConfigError(line, "expected a finite number, got '" + std::string(s) + "'");
}

std::uint64_t parse_unsigned(std::string_view s, std::size_t line) {
  if (auto v = detail::to_u64(s)) return *v;
  throw ConfigError(line, "expected a non-negative integer, got '" + std::string(s) + "'");
}

bool parse_bool(std::string_view s, std::size_t line) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(line, "expected true or false, got '" + std::string(s) + "'");
}

// "re" or "re,im".
Complex parse_complex(std::string_view s, std::size_t line) {
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) return {parse_real(trim(s), line), 0.0};
  return {parse_real(trim(s.substr(0, comma)), line), parse_real(trim(s.substr(comma + 1)), line)};
}

double open_unit(std::string_view s, std::size_t line, const char* key) {
  const double v = parse_real(s, line);
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(line, std::string(key) + " must lie in (0, 1)");
  return v;
}

enum class Section { Top, Ensemble, Experiment, Output };

struct KeySpec {
  Section section;
  std::function<void(ConfigDocument&, std::string_view, std::size_t)> apply;
};

const std::map<std::string, KeySpec, std::less<>>& key_table() {
  static const std::map<std::string, KeySpec, std::less<>> table{
      {"experiment",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          auto id = parse_experiment(v);
          if (!id) throw ConfigError(line, "unknown experiment '" + std::string(v) + "'");
          d.run.experiment = *id;
        }}},
      {"n_values",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.n_values.clear();
          for (auto item : detail::split(v, ',')) {
            const auto n = parse_unsigned(trim(item), line);
            if (n < 1) throw ConfigError(line, "n_values entries must be positive");
            if (!d.run.n_values.empty() && n <= d.run.n_values.back())
              throw ConfigError(line, "n_values must be strictly increasing");
            d.run.n_values.push_back(static_cast<std::size_t>(n));
          }
        }}},
      {"trials",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          const auto t = parse_unsigned(v, line);
          if (t < 1) throw ConfigError(line, "trials must be at least 1");
          d.run.trials = static_cast<std::size_t>(t);
        }}},
      {"master_seed",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.master_seed = parse_unsigned(v, line);
        }}},
      {"z_probe",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          const auto z = parse_complex(v, line);
          if (std::abs(z) > 3.0) throw ConfigError(line, "z_probe must satisfy |z| <= 3");
          d.run.z_probe = z;
        }}},
      {"c_probe",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.c_probe = open_unit(v, line, "c_probe");
        }}},
      {"d_fraction",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.d_fraction = open_unit(v, line, "d_fraction");
        }}},
      {"epsilon",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          const double e = parse_real(v, line);
          if (!(e > 0.0)) throw ConfigError(line, "epsilon must be positive");
          d.run.epsilon = e;
        }}},
      {"lln_m",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.lln_m = static_cast<std::size_t>(parse_unsigned(v, line));
        }}},
      {"draws",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          const auto n = parse_unsigned(v, line);
          if (n < 1) throw ConfigError(line, "draws must be at least 1");
          d.run.draws = static_cast<std::size_t>(n);
        }}},
      {"shared_seed",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.shared_seed = parse_bool(v, line);
        }}},
      {"baseline",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          const double b = parse_real(v, line);
          if (!(b > 0.0)) throw ConfigError(line, "baseline must be positive");
          d.run.baseline = b;
        }}},
      {"enforce_subspace_range",
       {Section::Experiment,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.enforce_subspace_range = parse_bool(v, line);
        }}},
      {"atom",
       {Section::Ensemble,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          auto a = parse_atom(v);
          if (!a) throw ConfigError(line, "unknown atom '" + std::string(v) + "'");
          d.run.atom = *a;
        }}},
      {"reference_atom",
       {Section::Ensemble,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          auto a = parse_atom(v);
          if (!a) throw ConfigError(line, "unknown atom '" + std::string(v) + "'");
          d.run.reference_atom = *a;
        }}},
      {"alpha",
       {Section::Ensemble,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          const double a = parse_real(v, line);
          if (!(a > 0.0 && a <= 1.0)) throw ConfigError(line, "alpha must lie in (0, 1]");
          d.run.alpha = a;
        }}},
      {"shift",
       {Section::Ensemble,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          auto k = parse_shift(v);
          if (!k) throw ConfigError(line, "unknown shift '" + std::string(v) + "'");
          d.run.shift.kind = *k;
        }}},
      {"shift_values",
       {Section::Ensemble,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.run.shift.values.clear();
          for (auto item : detail::split(v, ';')) d.run.shift.values.push_back(parse_complex(trim(item), line));
        }}},
      {"scaling",
       {Section::Ensemble,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          auto s = parse_scaling(v);
          if (!s) throw ConfigError(line, "unknown scaling '" + std::string(v) + "'");
          d.run.scaling = *s;
        }}},
      {"directory",
       {Section::Output,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          if (v.empty()) throw ConfigError(line, "directory must not be empty");
          d.output.directory = std::string(v);
        }}},
      {"spectra",
       {Section::Output,
        [](ConfigDocument& d, std::string_view v, std::size_t line) {
          d.output.spectra = parse_bool(v, line);
        }}},
  };
  return table;
}

std::string_view section_name(Section s) {
  switch (s) {
    case Section::Ensemble: return "ensemble";
    case Section::Experiment: return "experiment";
    case Section::Output: return "output";
    case Section::Top: break;
  }
  return "";
}

}  // namespace

ConfigDocument parse_config_document(std::string_view text) {
  ConfigDocument doc;
  Section current = Section::Top;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name == "ensemble") current = Section::Ensemble;
      else if (name == "experiment") current = Section::Experiment;
      else if (name == "output") current = Section::Output;
      else throw ConfigError(line_no, "unknown section [" + std::string(name) + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    const auto it = key_table().find(key);
    if (it == key_table().end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
    if (current != Section::Top && current != it->second.section)
      throw ConfigError(line_no, "key '" + std::string(key) + "' belongs to [" +
                                     std::string(section_name(it->second.section)) + "]");
    if (auto [pos, fresh] = seen.emplace(std::string(key), line_no); !fresh)
      throw ConfigError(line_no, "duplicate key '" + std::string(key) + "' (first on line " +
                                     std::to_string(pos->second) + ")");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
    it->second.apply(doc, value, line_no);
  }
  if (!seen.contains("n_values")) throw ConfigError(0, "missing required key 'n_values'");
  if (auto sv = seen.find("shift_values");
      sv != seen.end() && doc.run.shift.kind != ShiftKind::CustomDiag)
    throw ConfigError(sv->second, "shift_values requires shift = custom-diag");
  try {
    validate(doc.run);
  } catch (const ConfigError& e) {
    auto at = seen.find(doc.run.experiment == ExperimentId::DistanceConcentration && seen.contains("d_fraction")
                            ? "d_fraction"
                            : "n_values");
    throw ConfigError(at->second, e.what());
  }
  return doc;
}

RunConfig parse_config(std::string_view text) { return parse_config_document(text).run; }

ConfigDocument load_config(const std::filesystem::path& path) {
  return parse_config_document(detail::read_text(path));
}

std::string format_config(const RunConfig& cfg, const OutputSettings& output) {
  std::ostringstream os;
  auto num = [](double v) { return detail::shortest(v); };
  auto cplx = [&](Complex z) { return num(z.real()) + "," + num(z.imag()); };
  os << "[experiment]\n";
  os << "experiment = " << experiment_name(cfg.experiment) << "\n";
  os << "n_values = ";
  for (std::size_t k = 0; k < cfg.n_values.size(); ++k) os << (k ? "," : "") << cfg.n_values[k];
  os << "\n";
  os << "trials = " << cfg.trials << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  os << "z_probe = " << cplx(cfg.z_probe) << "\n";
  os << "c_probe = " << num(cfg.c_probe) << "\n";
  os << "d_fraction = " << num(cfg.d_fraction) << "\n";
  os << "epsilon = " << num(cfg.epsilon) << "\n";
  os << "lln_m = " << cfg.lln_m << "\n";
  os << "draws = " << cfg.draws << "\n";
  os << "shared_seed = " << (cfg.shared_seed ? "true" : "false") << "\n";
  if (cfg.baseline) os << "baseline = " << num(*cfg.baseline) << "\n";
  os << "enforce_subspace_range = " << (cfg.enforce_subspace_range ? "true" : "false") << "\n";
  os << "\n[ensemble]\n";
  os << "atom = " << atom_name(cfg.atom) << "\n";
  if (cfg.reference_atom) os << "reference_atom = " << atom_name(*cfg.reference_atom) << "\n";
  if (cfg.alpha) os << "alpha = " << num(*cfg.alpha) << "\n";
  os << "shift = " << shift_name(cfg.shift.kind) << "\n";
  if (cfg.shift.kind == ShiftKind::CustomDiag && !cfg.shift.values.empty()) {
    os << "shift_values = ";
    for (std::size_t k = 0; k < cfg.shift.values.size(); ++k) os << (k ? ";" : "") << cplx(cfg.shift.values[k]);
    os << "\n";
  }
  if (cfg.scaling) os << "scaling = " << scaling_name(*cfg.scaling) << "\n";
  os << "\n[output]\n";
  os << "directory = " << output.directory << "\n";
  os << "spectra = " << (output.spectra ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace sparsecirc
