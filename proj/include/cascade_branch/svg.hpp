#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cascade_branch {

struct LineSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<LineSeries> series;
    int width = 720;
    int height = 420;
};

/// Standalone SVG document: axes with min/max ticks, one polyline per series, a legend.
std::string render_svg(const LineChart& chart);

} // namespace cascade_branch
