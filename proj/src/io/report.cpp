#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "text.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/io.hpp"

namespace sparsecirc {

namespace {

std::string field_value(std::string_view v) {
  const bool plain = !v.empty() && v.find_first_of(" \t\"=\\") == std::string_view::npos;
  if (plain) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void fields(std::ostream& os, const NamedValues& values) {
  for (const auto& [k, v] : values) os << ' ' << k << '=' << number(v);
}

bool point_less(Complex a, Complex b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

}  // namespace

std::string format_report(const RunReport& report) {
  std::ostringstream os;
  os << "provenance version=" << field_value(report.version) << "\n";
  // The config echo reuses the config grammar, flattened onto key=value fields.
  os << "config";
  const auto config_text = format_config(report.config);
  for (auto line : detail::split(config_text, '\n')) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    os << ' ' << detail::trim(line.substr(0, eq)) << '=' << field_value(detail::trim(line.substr(eq + 1)));
  }
  os << "\n";
  for (const auto& r : report.records) {
    os << "record n=" << r.n << " trial=" << r.trial << " status=" << (r.exceptional ? "exceptional" : "ok");
    if (!r.note.empty()) os << " note=" << field_value(r.note);
    fields(os, r.values);
    os << "\n";
  }
  for (const auto& s : report.summary) {
    os << "summary n=" << s.n;
    fields(os, s.values);
    os << "\n";
  }
  for (const auto& f : report.flags)
    os << "flag id=" << field_value(f.id) << " criterion=" << field_value(f.criterion)
       << " state=" << (f.state == FlagState::Pass ? "pass" : "fail") << " detail=" << field_value(f.detail) << "\n";
  os << "exceptions count=" << report.exceptions << " trials=" << report.records.size() << "\n";
  os << "result state=" << (report.passed() ? "pass" : "fail") << "\n";
  return os.str();
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  detail::write_text(path, format_report(report));
}

std::string format_scientific(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  std::string s(buf);
  const auto e = s.find('e');
  const int exponent = std::atoi(s.c_str() + e + 1);
  return s.substr(0, e + 1) + std::to_string(exponent);
}

std::string format_eigenvalues_csv(const Esd& e) {
  auto pts = e.points();
  std::sort(pts.begin(), pts.end(), point_less);
  std::string out = "re,im\n";
  for (const auto& p : pts) out += format_scientific(p.real()) + "," + format_scientific(p.imag()) + "\n";
  return out;
}

void write_eigenvalues_csv(const Esd& e, const std::filesystem::path& path) {
  detail::write_text(path, format_eigenvalues_csv(e));
}

Esd parse_eigenvalues_csv(std::string_view text) {
  std::vector<Complex> pts;
  bool header = false;
  std::size_t line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (!header) {
      if (line != "re,im") throw ParseError(line_no, "expected header 're,im'");
      header = true;
      continue;
    }
    const auto cols = detail::split(line, ',');
    if (cols.size() != 2) throw ParseError(line_no, "expected two columns");
    const auto re = detail::to_double(detail::trim(cols[0]));
    const auto im = detail::to_double(detail::trim(cols[1]));
    if (!re || !im) throw ParseError(line_no, "malformed number");
    pts.emplace_back(*re, *im);
  }
  if (!header) throw ParseError(0, "missing header 're,im'");
  if (pts.empty()) throw ParseError(0, "no eigenvalue rows");
  return Esd(std::move(pts));
}

Esd read_eigenvalues_csv(const std::filesystem::path& path) {
  return parse_eigenvalues_csv(detail::read_text(path));
}

}  // namespace sparsecirc
