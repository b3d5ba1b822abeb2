#pragma once

#include <string>
#include <vector>

namespace ssanc::svgplot {

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::vector<bool> capped;  // same length as x when used; capped points get open markers
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    double x_ms_per_unit = 0.0;  // > 0 adds a milliseconds reading under each x tick
};

void write_svg(const std::string& path, const Plot& plot);

}  // namespace ssanc::svgplot
