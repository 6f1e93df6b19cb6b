#pragma once

#include <string>
#include <vector>

#include "bonabeau/experiments/commands.hpp"

namespace bonabeau::experiments {

struct PlotAxes {
  std::string x = "mu";          // swept column on the horizontal axis
  std::string y = "mean_sigma";  // plotted column
  std::string series = "F";      // one polyline per distinct value
};

/// Standalone SVG 1.1 line plot of y against x, one polyline per series value
/// in ascending order, colored black, red, blue, then further fixed colors.
/// Throws on empty input or non-finite values.
std::string emit_svg_plot(const std::vector<SweepRow>& rows, const PlotAxes& axes = {});

}  // namespace bonabeau::experiments
