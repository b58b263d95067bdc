#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sparselms/errors.hpp"
#include "sparselms/report.hpp"

namespace sparselms {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, double step) {
  if (std::fabs(v) < step * 1e-9) v = 0.0;
  char buf[32];
  const double mag = std::max(std::fabs(v), std::fabs(step));
  if (mag != 0.0 && (mag >= 1e5 || mag < 1e-3)) {
    std::snprintf(buf, sizeof buf, "%.3g", v);
  } else {
    int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  }
  return buf;
}

}  // namespace

double to_db(double value) { return 10.0 * std::log10(value); }

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {};
  if (hi < lo) std::swap(lo, hi);
  if (hi == lo) {
    const double pad = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  target = std::max(target, 2);
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::floor(lo / step + 1e-9) * step;
  for (double t = first; t <= hi + step * 0.5 && ticks.size() < 100; t += step) {
    ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
    if (t >= hi - step * 1e-9) break;
  }
  return ticks;
}

std::string render_line_chart(std::span<const LineSeries> series, const ChartOptions& options) {
  struct Prepared {
    std::string name;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Prepared> data;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    Prepared p{s.name, {}};
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      double y = s.y[i];
      if (options.db_scale) {
        if (!(y > 0.0)) continue;
        y = to_db(y);
      }
      if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
      p.pts.emplace_back(s.x[i], y);
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    data.push_back(std::move(p));
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  const auto xt = nice_ticks(xmin, xmax, 6);
  const auto yt = nice_ticks(ymin, ymax, 6);
  const double x0 = xt.front(), x1 = xt.back();
  const double y0 = yt.front(), y1 = yt.back();
  const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
  const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;

  const double W = options.width, H = options.height;
  const double left = 80, right = 170, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x1 == x0 ? 0.5 : (x - x0) / (x1 - x0)) * pw; };
  auto py = [&](double y) { return top + ph - (y1 == y0 ? 0.5 : (y - y0) / (y1 - y0)) * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" " +
           "font-family=\"sans-serif\" font-size=\"16\">" + escape_xml(options.title) +
           "</text>\n";
  }

  out += "<g font-family=\"sans-serif\" font-size=\"11\" stroke-width=\"1\">\n";
  for (double t : xt) {
    const double x = px(t);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(top) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(top + ph) + "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(top + ph + 16) +
           "\" text-anchor=\"middle\">" + escape_xml(tick_label(t, xstep)) + "</text>\n";
  }
  for (double t : yt) {
    const double y = py(t);
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + pw) +
           "\" y2=\"" + num(y) + "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
           escape_xml(tick_label(t, ystep)) + "</text>\n";
  }
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "</g>\n";

  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape_xml(options.x_label) + "</text>\n";
  std::string ylab = options.y_label;
  if (options.db_scale) ylab += ylab.empty() ? "dB" : " (dB)";
  out += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" " +
         "transform=\"rotate(-90 18 " + num(top + ph / 2) + ")\" font-family=\"sans-serif\" " +
         "font-size=\"13\">" + escape_xml(ylab) + "</text>\n";

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const auto& pts = data[i].pts;
    if (pts.size() == 1) {
      out += "<circle cx=\"" + num(px(pts[0].first)) + "\" cy=\"" + num(py(pts[0].second)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    } else if (!pts.empty()) {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k) out += ' ';
        out += num(px(pts[k].first)) + "," + num(py(pts[k].second));
      }
      out += "\"/>\n";
    }
  }

  out += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const double ly = top + 14 + 20.0 * static_cast<double>(i);
    const double lx = left + pw + 16;
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) +
           "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\">" +
           escape_xml(data[i].name) + "</text>\n";
  }
  out += "</g>\n";
  out += "</svg>\n";
  return out;
}

std::string render_svg_string(const CaseReport& report, std::string_view metric, bool log_scale) {
  if (std::find(report.metrics.begin(), report.metrics.end(), metric) == report.metrics.end()) {
    std::string known;
    for (const auto& m : report.metrics) known += (known.empty() ? "" : ", ") + m;
    throw UsageError("case '" + report.label + "' has no metric '" + std::string(metric) +
                     "' (recorded: " + known + ")");
  }
  std::vector<LineSeries> lines;
  for (const auto& algo : report.algorithms) {
    const auto& s = report.at(algo, metric);
    LineSeries l{algo, {}, s.mean};
    l.x.resize(s.mean.size());
    for (std::size_t k = 0; k < l.x.size(); ++k) l.x[k] = static_cast<double>(k + 1);
    lines.push_back(std::move(l));
  }
  ChartOptions opts;
  opts.title = report.label.empty() ? std::string(metric) : report.label + ": " + std::string(metric);
  opts.y_label = std::string(metric);
  opts.db_scale = log_scale;
  return render_line_chart(lines, opts);
}

void render_svg(const CaseReport& report, std::string_view metric, bool log_scale,
                const std::string& path) {
  const std::string text = render_svg_string(report, metric, log_scale);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  }
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace sparselms
