#ifndef KUCB_SVG_HPP
#define KUCB_SVG_HPP

#include <optional>
#include <string>
#include <vector>

namespace kucb {

// Deterministic, dependency-free SVG line/bar plots. Output is a pure
// function of the inputs so plots are diffable artifacts.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    // When set, a least-squares log-log slope of the first series is
    // annotated on the plot.
    bool annotate_slope = false;
    int width = 720;
    int height = 480;
};

std::string render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options);

struct BarGroup {
    std::string label;
    double value = 0.0;
    double reference = 0.0;  // drawn as a tick (e.g. the allowed bound)
};

std::string render_bar_plot(const std::vector<BarGroup>& bars, const PlotOptions& options);

}  // namespace kucb

#endif
