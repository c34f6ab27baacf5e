#pragma once

#include <string>
#include <vector>

namespace lpc::experiments {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Lines for theory curves, markers for empirical points.
  bool markers = false;
  /// Bars drawn from the x axis, for histograms.
  bool bars = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Reference diagonal y = x (noise-rate recovery plots).
  bool diagonal = false;
};

/// Self-contained SVG with the plotted data repeated in a comment block.
std::string render_svg(const PlotSpec& spec);

} // namespace lpc::experiments
