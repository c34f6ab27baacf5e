#include "lpc/experiments/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lpc/experiments/report.hpp"

namespace lpc::experiments {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
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

// Two dashes may not appear inside an XML comment.
std::string comment_safe(std::string s) {
  for (std::size_t pos = s.find("--"); pos != std::string::npos; pos = s.find("--")) s.replace(pos, 2, "- -");
  return s;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

std::string tick_label(double v) {
  std::ostringstream o;
  o.precision(4);
  o << (std::abs(v) < 1e-12 ? 0.0 : v);
  return o.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

} // namespace

std::string render_svg(const PlotSpec& spec) {
  Range xr, yr;
  for (const auto& s : spec.series) {
    for (double x : s.x) xr.add(x);
    for (double y : s.y) yr.add(y);
    if (s.bars) yr.add(0.0);
  }
  if (spec.diagonal) {
    const double lo = std::min(xr.lo, yr.lo), hi = std::max(xr.hi, yr.hi);
    xr.lo = yr.lo = lo;
    xr.hi = yr.hi = hi;
  }
  xr.finish();
  yr.finish();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<!-- data\nseries,x,y\n";
  for (const auto& s : spec.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      o << comment_safe(s.label) << ',' << format_number(s.x[i]) << ',' << format_number(s.y[i]) << '\n';
  o << "-->\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";

  // Axes with five ticks each.
  o << "<g stroke=\"#444\" fill=\"none\">\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph << "\"/>\n";
  o << "</g>\n<g fill=\"#222\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    o << "<line x1=\"" << fixed(sx(xv)) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(sx(xv))
      << "\" y2=\"" << fixed(kTop + ph + 5) << "\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(xv) << "</text>\n";
    o << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(sy(yv)) << "\" x2=\"" << kLeft << "\" y2=\""
      << fixed(sy(yv)) << "\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(sy(yv) + 4) << "\" text-anchor=\"end\">"
      << tick_label(yv) << "</text>\n";
  }
  o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 12)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fixed(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";
  o << "</g>\n";

  if (spec.diagonal) {
    const double lo = std::max(xr.lo, yr.lo), hi = std::min(xr.hi, yr.hi);
    o << "<line x1=\"" << fixed(sx(lo)) << "\" y1=\"" << fixed(sy(lo)) << "\" x2=\"" << fixed(sx(hi))
      << "\" y2=\"" << fixed(sy(hi)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    const std::size_t count = std::min(s.x.size(), s.y.size());
    if (s.bars) {
      const double width = count > 1 ? std::abs(sx(s.x[1]) - sx(s.x[0])) : 4.0;
      o << "<g fill=\"" << color << "\" fill-opacity=\"0.35\">\n";
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::isfinite(s.y[i])) continue;
        const double top = sy(std::max(s.y[i], 0.0));
        o << "<rect x=\"" << fixed(sx(s.x[i]) - width / 2) << "\" y=\"" << fixed(top) << "\" width=\""
          << fixed(width) << "\" height=\"" << fixed(sy(0.0) - top) << "\"/>\n";
      }
      o << "</g>\n";
    } else if (s.markers) {
      o << "<g fill=\"" << color << "\">\n";
      for (std::size_t i = 0; i < count; ++i)
        if (std::isfinite(s.y[i]))
          o << "<circle cx=\"" << fixed(sx(s.x[i])) << "\" cy=\"" << fixed(sy(s.y[i])) << "\" r=\"3\"/>\n";
      o << "</g>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t i = 0; i < count; ++i)
        if (std::isfinite(s.y[i])) o << fixed(sx(s.x[i])) << ',' << fixed(sy(s.y[i])) << ' ';
      o << "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 12;
    if (s.markers) o << "<circle cx=\"" << fixed(lx + 8) << "\" cy=\"" << fixed(ly - 4) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    else o << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(lx + 16) << "\" y2=\""
           << fixed(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"" << (s.bars ? 6 : 2) << "\"/>\n";
    o << "<text x=\"" << fixed(lx + 22) << "\" y=\"" << fixed(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

} // namespace lpc::experiments
