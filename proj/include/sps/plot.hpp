#pragma once

// Static SVG 1.1 line charts.

#include <string>
#include <vector>

namespace sps {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    int width = 640;
    int height = 420;
};

// Non-finite points (and nonpositive x on a log axis) are skipped.
std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opts);

}  // namespace sps
