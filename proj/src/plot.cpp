#include "sparserc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sparserc {

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const PlotSeries& series) {
  if (series.x.size() != series.mean.size() || series.x.size() != series.std.size())
    throw Error(ErrorKind::ShapeMismatch, "write_svg_plot: series lengths differ");
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());

  constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 60;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!series.x.empty()) {
    x_lo = *std::min_element(series.x.begin(), series.x.end());
    x_hi = *std::max_element(series.x.begin(), series.x.end());
    y_lo = y_hi = series.mean.front();
    for (size_t i = 0; i < series.x.size(); ++i) {
      const double s = std::isfinite(series.std[i]) ? series.std[i] : 0.0;
      y_lo = std::min(y_lo, series.mean[i] - s);
      y_hi = std::max(y_hi, series.mean[i] + s);
    }
  }
  if (x_hi == x_lo) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi == y_lo) { y_lo -= 0.5; y_hi += 0.5; }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (v - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << tick_label(yv)
        << "</text>\n";
  }
  for (double xv : series.x)
    out << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << escape_xml(x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << height / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape_xml(y_label) << "</text>\n";

  if (!series.x.empty()) {
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < series.x.size(); ++i) out << px(series.x[i]) << ',' << py(series.mean[i]) << ' ';
    out << "\"/>\n";
    for (size_t i = 0; i < series.x.size(); ++i) {
      const double s = std::isfinite(series.std[i]) ? series.std[i] : 0.0;
      const double cx = px(series.x[i]);
      out << "<line x1=\"" << cx << "\" y1=\"" << py(series.mean[i] - s) << "\" x2=\"" << cx << "\" y2=\""
          << py(series.mean[i] + s) << "\" stroke=\"steelblue\"/>\n";
      out << "<circle cx=\"" << cx << "\" cy=\"" << py(series.mean[i]) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace sparserc
