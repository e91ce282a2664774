#include "oscibench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace oscibench {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#17becf", "#8c564b", "#7f7f7f", "#e377c2", "#bcbd22"};
constexpr int kPaletteSize = 10;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
  const double ml = 72, mr = 18, mt = 36, mb = 48;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;

  auto usable = [&](double v, bool logscale) {
    return std::isfinite(v) && (!logscale || v > 0.0);
  };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const PlotSeries& s : series)
    for (const auto& [x, y] : s.points) {
      if (!usable(x, spec.logx) || !usable(y, spec.logy)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin < xmax)) { xmin -= 0.5; xmax = xmin + 1.0; }
  if (!(ymin < ymax)) { ymin -= 0.5; ymax = ymin + 1.0; }

  auto fwd = [](double v, bool logscale) { return logscale ? std::log10(v) : v; };
  const double tx0 = fwd(xmin, spec.logx), tx1 = fwd(xmax, spec.logx);
  const double ty0 = fwd(ymin, spec.logy), ty1 = fwd(ymax, spec.logy);

  auto px = [&](double v) { return ml + (fwd(v, spec.logx) - tx0) / (tx1 - tx0) * pw; };
  auto py = [&](double v) { return mt + ph - (fwd(v, spec.logy) - ty0) / (ty1 - ty0) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(spec.width) +
         "\" height=\"" + num(spec.height) + "\" viewBox=\"0 0 " + num(spec.width) +
         " " + num(spec.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" + esc(spec.title) + "</text>\n";

  // frame
  out += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  auto ticks = [&](double lo, double hi, bool logscale) {
    std::vector<double> t;
    if (logscale) {
      const int d0 = static_cast<int>(std::ceil(fwd(lo, true) - 1e-9));
      const int d1 = static_cast<int>(std::floor(fwd(hi, true) + 1e-9));
      int step = 1;
      while ((d1 - d0) / step > 8) ++step;
      for (int d = d0; d <= d1; d += step) t.push_back(std::pow(10.0, d));
    } else {
      for (int k = 0; k <= 4; ++k) t.push_back(lo + (hi - lo) * k / 4.0);
    }
    return t;
  };

  for (double tx : ticks(xmin, xmax, spec.logx)) {
    const double x = px(tx);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(x) +
           "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(mt + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           num(tx) + "</text>\n";
  }
  for (double ty : ticks(ymin, ymax, spec.logy)) {
    const double y = py(ty);
    out += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(ml) +
           "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           num(ty) + "</text>\n";
  }
  out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(spec.height - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         esc(spec.xlabel) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + num(mt + ph / 2) + ")\">" +
         esc(spec.ylabel) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    for (const auto& [x, y] : series[si].points) {
      if (!usable(x, spec.logx) || !usable(y, spec.logy)) continue;
      pts += num(px(x)) + "," + num(py(y)) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    const double lx = ml + pw - 110, ly = mt + 14 + 16 * static_cast<double>(si);
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(lx + 22) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + esc(series[si].label) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace oscibench
