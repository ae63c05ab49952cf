#pragma once

#include <string>
#include <vector>

namespace twinrec::svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::string color;
    bool dashed = false;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<Series> series;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string render(const Chart& chart, int width = 640, int height = 400);

const std::string& palette(std::size_t i);

}  // namespace twinrec::svg
