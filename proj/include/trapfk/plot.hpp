#ifndef TRAPFK_PLOT_HPP
#define TRAPFK_PLOT_HPP

// Minimal static SVG line/scatter plots for run reports. Deterministic text
// output (fixed number formatting), so plots can be diffed like CSVs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trapfk/errors.hpp"

namespace trapfk {

enum class SeriesStyle { line, step, points };

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  SeriesStyle style = SeriesStyle::line;
};

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), xl_(std::move(x_label)), yl_(std::move(y_label)) {}

  SvgPlot& log_x(bool on = true) {
    logx_ = on;
    return *this;
  }
  SvgPlot& log_y(bool on = true) {
    logy_ = on;
    return *this;
  }

  SvgPlot& add(PlotSeries s) {
    if (s.x.size() != s.y.size()) throw InputError("plot series '" + s.label + "': x and y differ in length");
    series_.push_back(std::move(s));
    return *this;
  }

  SvgPlot& add(std::string label, std::vector<double> x, std::vector<double> y, SeriesStyle style = SeriesStyle::line) {
    return add(PlotSeries{std::move(label), std::move(x), std::move(y), style});
  }

  /// Empirical CDF of a sample as a step series.
  SvgPlot& add_ecdf(std::string label, std::span<const double> sample, std::size_t max_points = 2000) {
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    PlotSeries p{std::move(label), {}, {}, SeriesStyle::step};
    const std::size_t stride = std::max<std::size_t>(1, s.size() / max_points);
    for (std::size_t i = 0; i < s.size(); i += stride) {
      p.x.push_back(s[i]);
      p.y.push_back(static_cast<double>(i + 1) / static_cast<double>(s.size()));
    }
    if (!s.empty() && p.x.back() != s.back()) {
      p.x.push_back(s.back());
      p.y.push_back(1.0);
    }
    return add(std::move(p));
  }

  std::string render() const {
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto& s : series_) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double tx = tx_(s.x[i]);
        const double ty = ty_(s.y[i]);
        if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
        x0 = std::min(x0, tx);
        x1 = std::max(x1, tx);
        y0 = std::min(y0, ty);
        y1 = std::max(y1, ty);
      }
    }
    if (!std::isfinite(x0)) {
      x0 = y0 = 0.0;
      x1 = y1 = 1.0;
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    const double pady = 0.05 * (y1 - y0);
    y0 -= pady;
    y1 += pady;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" font-family=\"sans-serif\" "
           "font-size=\"12\">\n";
    out += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    out += text(320, 22, esc(title_), "middle", 14);
    out += text(320, 430, esc(xl_) + (logx_ ? " (log10)" : ""), "middle", 12);
    out += "<text x=\"16\" y=\"220\" text-anchor=\"middle\" transform=\"rotate(-90 16 220)\">" + esc(yl_) +
           (logy_ ? " (log10)" : "") + "</text>\n";
    out += "<rect x=\"" + fmt(kL) + "\" y=\"" + fmt(kT) + "\" width=\"" + fmt(kR - kL) + "\" height=\"" +
           fmt(kB - kT) + "\" fill=\"none\" stroke=\"black\"/>\n";
    auto px = [&](double v) { return kL + (v - x0) / (x1 - x0) * (kR - kL); };
    auto py = [&](double v) { return kB - (v - y0) / (y1 - y0) * (kB - kT); };
    for (int i = 0; i <= 4; ++i) {
      const double vx = x0 + (x1 - x0) * i / 4.0;
      const double vy = y0 + (y1 - y0) * i / 4.0;
      out += text(px(vx), kB + 16, fmt(vx, 4), "middle", 10);
      out += text(kL - 6, py(vy) + 4, fmt(vy, 4), "end", 10);
    }
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    for (std::size_t k = 0; k < series_.size(); ++k) {
      const auto& s = series_[k];
      const std::string c = colours[k % 7];
      if (s.style == SeriesStyle::points) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          const double a = tx_(s.x[i]);
          const double b = ty_(s.y[i]);
          if (!std::isfinite(a) || !std::isfinite(b)) continue;
          out += "<circle cx=\"" + fmt(px(a)) + "\" cy=\"" + fmt(py(b)) + "\" r=\"3\" fill=\"" + c + "\"/>\n";
        }
      } else {
        std::string pts;
        double last_y = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          const double a = tx_(s.x[i]);
          const double b = ty_(s.y[i]);
          if (!std::isfinite(a) || !std::isfinite(b)) continue;
          if (s.style == SeriesStyle::step && std::isfinite(last_y)) pts += fmt(px(a)) + "," + fmt(py(last_y)) + " ";
          pts += fmt(px(a)) + "," + fmt(py(b)) + " ";
          last_y = b;
        }
        out += "<polyline fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
      }
      const double ly = kT + 14 + 16 * static_cast<double>(k);
      out += "<rect x=\"" + fmt(kR - 150) + "\" y=\"" + fmt(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" + c +
             "\"/>\n";
      out += text(kR - 135, ly, esc(s.label), "start", 11);
    }
    out += "</svg>\n";
    return out;
  }

 private:
  static constexpr double kL = 70;
  static constexpr double kR = 620;
  static constexpr double kT = 36;
  static constexpr double kB = 396;

  double tx_(double v) const { return logx_ ? (v > 0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN()) : v; }
  double ty_(double v) const { return logy_ ? (v > 0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN()) : v; }

  static std::string fmt(double v, int digits = 6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
  }

  static std::string esc(const std::string& s) {
    std::string o;
    for (char ch : s) {
      if (ch == '<') o += "&lt;";
      else if (ch == '>') o += "&gt;";
      else if (ch == '&') o += "&amp;";
      else o += ch;
    }
    return o;
  }

  static std::string text(double x, double y, const std::string& s, const char* anchor, int size) {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor + "\" font-size=\"" +
           std::to_string(size) + "\">" + s + "</text>\n";
  }

  std::string title_;
  std::string xl_;
  std::string yl_;
  bool logx_ = false;
  bool logy_ = false;
  std::vector<PlotSeries> series_;
};

}  // namespace trapfk

#endif  // TRAPFK_PLOT_HPP
