#include "gekrig/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gekrig/errors.hpp"

namespace gekrig {

namespace {

constexpr int kPanelW = 480;
constexpr int kPanelH = 340;
constexpr int kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(std::log10(v))));
  return buf;
}

struct Series {
  std::string label;
  std::vector<std::pair<std::size_t, std::pair<double, double>>> points;  // n -> (seconds, re)
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

struct LogRange {
  int lo = -3, hi = 0;
  void fit(const std::vector<double>& values) {
    if (values.empty()) return;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = static_cast<int>(std::floor(std::log10(*mn)));
    hi = static_cast<int>(std::ceil(std::log10(*mx)));
    if (hi <= lo) hi = lo + 1;
  }
  double frac(double v) const { return (std::log10(v) - lo) / (hi - lo); }
};

std::vector<Panel> group(const std::vector<SummaryRow>& rows) {
  std::vector<Panel> panels;
  std::map<std::string, std::size_t> panel_index;
  std::vector<std::map<std::string, std::size_t>> series_index;
  for (const auto& r : rows) {
    if (!(r.mean_re > 0.0) || !(r.mean_fit_seconds > 0.0)) continue;
    const std::string title = r.function + " (d=" + std::to_string(r.d) + ")";
    auto pit = panel_index.find(title);
    if (pit == panel_index.end()) {
      pit = panel_index.emplace(title, panels.size()).first;
      panels.push_back({title, {}});
      series_index.emplace_back();
    }
    std::string label = r.model;
    if (r.h > 0) label += " h" + std::to_string(r.h);
    if (r.m > 0) label += " m" + std::to_string(r.m);
    auto& sidx = series_index[pit->second];
    auto sit = sidx.find(label);
    Panel& p = panels[pit->second];
    if (sit == sidx.end()) {
      sit = sidx.emplace(label, p.series.size()).first;
      p.series.push_back({label, {}});
    }
    p.series[sit->second].points.push_back({r.n, {r.mean_fit_seconds, r.mean_re}});
  }
  for (auto& p : panels)
    for (auto& s : p.series)
      std::stable_sort(s.points.begin(), s.points.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
  if (panels.empty()) panels.push_back({"no data", {}});
  return panels;
}

void draw_panel(std::ostringstream& svg, const Panel& panel, int y0) {
  std::vector<double> xs, ys;
  for (const auto& s : panel.series)
    for (const auto& [n, p] : s.points) {
      xs.push_back(p.first);
      ys.push_back(p.second);
    }
  LogRange xr, yr;
  xr.fit(xs);
  yr.fit(ys);
  const int pw = kPanelW - kLeft - kRight;
  const int ph = kPanelH - kTop - kBottom;
  const int ox = kLeft, oy = y0 + kTop;
  auto px = [&](double v) { return ox + xr.frac(v) * pw; };
  auto py = [&](double v) { return oy + (1.0 - yr.frac(v)) * ph; };

  svg << "<text x=\"" << ox + pw / 2 << "\" y=\"" << y0 + 24 << "\" text-anchor=\"middle\" font-size=\"14\">"
      << panel.title << "</text>\n";
  svg << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = xr.lo; e <= xr.hi; ++e) {
    const double x = px(std::pow(10.0, e));
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << oy + ph << "\" x2=\"" << num(x) << "\" y2=\"" << oy + ph + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << oy + ph + 18 << "\" text-anchor=\"middle\" font-size=\"10\">"
        << sci(std::pow(10.0, e)) << "</text>\n";
  }
  for (int e = yr.lo; e <= yr.hi; ++e) {
    const double y = py(std::pow(10.0, e));
    svg << "<line x1=\"" << ox - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << ox << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ox - 8 << "\" y=\"" << num(y + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
        << sci(std::pow(10.0, e)) << "</text>\n";
  }
  svg << "<text x=\"" << ox + pw / 2 << "\" y=\"" << oy + ph + 36
      << "\" text-anchor=\"middle\" font-size=\"12\">fit time (s)</text>\n";
  svg << "<text x=\"" << ox - 50 << "\" y=\"" << oy + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 " << ox - 50 << ' ' << oy + ph / 2 << ")\">mean RE</text>\n";

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const Series& s = panel.series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i)
      svg << (i ? " " : "") << num(px(s.points[i].second.first)) << ',' << num(py(s.points[i].second.second));
    svg << "\"/>\n";
    for (const auto& [n, p] : s.points)
      svg << "<circle cx=\"" << num(px(p.first)) << "\" cy=\"" << num(py(p.second)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    const int ly = oy + 12 + static_cast<int>(k) * 16;
    svg << "<line x1=\"" << ox + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ox + pw + 28 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ox + pw + 32 << "\" y=\"" << ly << "\" font-size=\"11\">" << s.label << "</text>\n";
  }
}

}  // namespace

std::string render_tradeoff_svg(const std::vector<SummaryRow>& rows) {
  const auto panels = group(rows);
  const int height = kPanelH * static_cast<int>(panels.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelW << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << kPanelW << ' ' << height << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) draw_panel(svg, panels[i], static_cast<int>(i) * kPanelH);
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << render_tradeoff_svg(rows);
  if (!out) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace gekrig
