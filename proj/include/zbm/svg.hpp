#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace zbm {

// Minimal deterministic SVG output: fixed canvas, no timestamps, coordinates
// printed with a fixed format so identical input gives identical bytes.
class SvgCanvas {
 public:
  SvgCanvas(double width = 640, double height = 420) : w_(width), h_(height) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) +
             "\" height=\"" + num(h_) + "\" viewBox=\"0 0 " + num(w_) + " " +
             num(h_) + "\">\n";
    body_ += "<rect width=\"" + num(w_) + "\" height=\"" + num(h_) +
             "\" fill=\"white\"/>\n";
  }

  // Maps data space [x0,x1]x[y0,y1] to the plot area.
  void set_view(double x0, double x1, double y0, double y1) {
    x0_ = x0;
    x1_ = x1 > x0 ? x1 : x0 + 1.0;
    y0_ = y0;
    y1_ = y1 > y0 ? y1 : y0 + 1.0;
  }

  void axes() {
    body_ += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(h_ - kMargin) +
             "\" x2=\"" + num(w_ - kMargin) + "\" y2=\"" + num(h_ - kMargin) +
             "\" stroke=\"black\"/>\n";
    body_ += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) +
             "\" x2=\"" + num(kMargin) + "\" y2=\"" + num(h_ - kMargin) +
             "\" stroke=\"black\"/>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color) {
    if (xs.empty()) return;
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      pts += num(px(xs[i])) + "," + num(py(ys[i]));
      if (i + 1 < xs.size()) pts += " ";
    }
    body_ += "<polyline fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
  }

  // ECDF step function.
  void ecdf_steps(const std::vector<double>& sorted, const std::string& color) {
    if (sorted.empty()) return;
    std::vector<double> xs, ys;
    double n = static_cast<double>(sorted.size());
    xs.push_back(sorted.front());
    ys.push_back(0.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      xs.push_back(sorted[i]);
      ys.push_back(static_cast<double>(i) / n);
      xs.push_back(sorted[i]);
      ys.push_back(static_cast<double>(i + 1) / n);
    }
    polyline(xs, ys, color);
  }

  void heat_cell(std::size_t i, std::size_t j, std::size_t dim, double v01) {
    double cell = (w_ - 2 * kMargin) / static_cast<double>(dim);
    double cellh = (h_ - 2 * kMargin) / static_cast<double>(dim);
    double x = kMargin + static_cast<double>(j) * cell;
    double y = kMargin + static_cast<double>(i) * cellh;
    int r = static_cast<int>(255.0 * std::clamp(v01, 0.0, 1.0));
    char color[8];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", r, 32, 255 - r);
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
             num(cell) + "\" height=\"" + num(cellh) + "\" fill=\"" + color +
             "\"/>\n";
  }

  void label(double x01, double y01, const std::string& text) {
    body_ += "<text x=\"" + num(kMargin + x01 * (w_ - 2 * kMargin)) + "\" y=\"" +
             num(kMargin + (1.0 - y01) * (h_ - 2 * kMargin)) +
             "\" font-size=\"11\" font-family=\"monospace\">" + text + "</text>\n";
  }

  std::string finish() const { return body_ + "</svg>\n"; }

 private:
  static constexpr double kMargin = 40.0;

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  double px(double x) const {
    return kMargin + (x - x0_) / (x1_ - x0_) * (w_ - 2 * kMargin);
  }
  double py(double y) const {
    return h_ - kMargin - (y - y0_) / (y1_ - y0_) * (h_ - 2 * kMargin);
  }

  double w_, h_;
  double x0_ = 0.0, x1_ = 1.0, y0_ = 0.0, y1_ = 1.0;
  std::string body_;
};

}  // namespace zbm
