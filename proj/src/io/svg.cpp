#include <algorithm>
#include <cmath>
#include <cstdio>

#include "text.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/io.hpp"

namespace sparsecirc {

namespace {

std::string fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  // Avoid "-0.000".
  return std::string(buf) == "-0.000" ? "0.000" : buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_bounds(const FigureSpec& s) {
  for (double v : {s.x_lo, s.x_hi, s.y_lo, s.y_hi, s.marker_size})
    if (!std::isfinite(v)) throw ContractError("figure bounds and marker size must be finite");
  if (!(s.x_lo < s.x_hi) || !(s.y_lo < s.y_hi)) throw ContractError("figure bounds must satisfy lo < hi");
  if (!(s.marker_size > 0.0)) throw ContractError("marker size must be positive");
}

}  // namespace

double fraction_outside(const Esd& e, double radius) {
  std::size_t out = 0;
  for (const auto& p : e.points())
    if (std::abs(p) > radius) ++out;
  return static_cast<double>(out) / static_cast<double>(e.n());
}

std::string render_scatter_svg(const FigureSpec& spec) {
  return render_scatter_svg(spec, read_eigenvalues_csv(spec.source));
}

std::string render_scatter_svg(const FigureSpec& spec, const Esd& e) {
  check_bounds(spec);
  constexpr double margin = 40.0;
  constexpr double plot_w = 520.0;
  // Equal scale on both axes so the unit circle stays a circle.
  const double scale = plot_w / (spec.x_hi - spec.x_lo);
  const double plot_h = scale * (spec.y_hi - spec.y_lo);
  const double width = plot_w + 2 * margin, height = plot_h + 2 * margin;
  auto px = [&](double x) { return margin + (x - spec.x_lo) * scale; };
  auto py = [&](double y) { return margin + (spec.y_hi - y) * scale; };

  auto pts = e.points();
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(width) + "\" height=\"" +
       fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) + "\">\n";
  s += "<title>" + xml_escape(spec.title) + "</title>\n";
  s += "<defs><clipPath id=\"plot\"><rect x=\"" + fixed(margin) + "\" y=\"" + fixed(margin) + "\" width=\"" +
       fixed(plot_w) + "\" height=\"" + fixed(plot_h) + "\"/></clipPath></defs>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) + "\" fill=\"white\"/>\n";
  s += "<rect class=\"frame\" x=\"" + fixed(margin) + "\" y=\"" + fixed(margin) + "\" width=\"" + fixed(plot_w) +
       "\" height=\"" + fixed(plot_h) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  if (spec.x_lo < 0.0 && spec.x_hi > 0.0)
    s += "<line class=\"axis\" x1=\"" + fixed(px(0)) + "\" y1=\"" + fixed(margin) + "\" x2=\"" + fixed(px(0)) +
         "\" y2=\"" + fixed(margin + plot_h) + "\" stroke=\"gray\" stroke-width=\"0.5\"/>\n";
  if (spec.y_lo < 0.0 && spec.y_hi > 0.0)
    s += "<line class=\"axis\" x1=\"" + fixed(margin) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" +
         fixed(margin + plot_w) + "\" y2=\"" + fixed(py(0)) + "\" stroke=\"gray\" stroke-width=\"0.5\"/>\n";
  s += "<text x=\"" + fixed(width / 2) + "\" y=\"" + fixed(margin / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(spec.title) +
       "</text>\n";
  s += "<text x=\"" + fixed(margin) + "\" y=\"" + fixed(height - margin / 3) +
       "\" font-family=\"sans-serif\" font-size=\"10\">" + fixed(spec.x_lo) + "</text>\n";
  s += "<text x=\"" + fixed(margin + plot_w) + "\" y=\"" + fixed(height - margin / 3) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + fixed(spec.x_hi) + "</text>\n";
  s += "<g clip-path=\"url(#plot)\" fill=\"black\">\n";
  for (const auto& p : pts)
    s += "<circle class=\"marker\" cx=\"" + fixed(px(p.real())) + "\" cy=\"" + fixed(py(p.imag())) + "\" r=\"" +
         fixed(spec.marker_size) + "\"/>\n";
  if (spec.overlay)
    s += "<circle class=\"reference\" cx=\"" + fixed(px(0)) + "\" cy=\"" + fixed(py(0)) + "\" r=\"" +
         fixed(scale) + "\" fill=\"none\" stroke=\"red\" stroke-width=\"1\"/>\n";
  s += "</g>\n</svg>\n";
  return s;
}

FigureSpec parse_figure_spec(std::string_view text, const std::filesystem::path& base) {
  FigureSpec f;
  bool have_source = false;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  auto real = [&](std::string_view v) {
    auto x = detail::to_double(v);
    if (!x || !std::isfinite(*x)) throw ParseError(line_no, "expected a finite number");
    return *x;
  };
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw ParseError(line_no, "duplicate key '" + key + "'");
    seen.push_back(key);
    if (key == "source") {
      f.source = resolve(value);
      have_source = true;
    } else if (key == "x_lo") f.x_lo = real(value);
    else if (key == "x_hi") f.x_hi = real(value);
    else if (key == "y_lo") f.y_lo = real(value);
    else if (key == "y_hi") f.y_hi = real(value);
    else if (key == "marker_size") f.marker_size = real(value);
    else if (key == "title") f.title = std::string(value);
    else if (key == "output") f.output = resolve(value);
    else if (key == "overlay") {
      if (value == "true") f.overlay = true;
      else if (value == "false") f.overlay = false;
      else throw ParseError(line_no, "overlay must be true or false");
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_source) throw ParseError(0, "missing required key 'source'");
  if (!(f.x_lo < f.x_hi) || !(f.y_lo < f.y_hi)) throw ParseError(0, "axis bounds must satisfy lo < hi");
  if (!(f.marker_size > 0.0)) throw ParseError(0, "marker_size must be positive");
  return f;
}

}  // namespace sparsecirc
