// SPDX-License-Identifier: Apache-2.0
//
// Minimal static line plots (SVG) rendered from figure data.
#pragma once

#include <string>
#include <vector>

namespace isac {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

std::string render_svg(const PlotSpec& spec);
void write_svg(const std::string& path, const PlotSpec& spec);

} // namespace isac
