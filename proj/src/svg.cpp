#include "kucb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kucb/errors.hpp"
#include "kucb/infogain.hpp"

namespace kucb {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;  // data range (already log-mapped when requested)
    int left = 64, right = 16, top = 40, bottom = 48;
    int width, height;

    double px(double x) const {
        const double span = x1 > x0 ? x1 - x0 : 1.0;
        return left + (x - x0) / span * (width - left - right);
    }
    double py(double y) const {
        const double span = y1 > y0 ? y1 - y0 : 1.0;
        return height - bottom - (y - y0) / span * (height - top - bottom);
    }
};

void open_svg(std::ostringstream& out, const PlotOptions& options) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"monospace\" font-size=\"15\">" << options.title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, const PlotOptions& options) {
    out << "<line x1=\"" << f.left << "\" y1=\"" << f.height - f.bottom << "\" x2=\""
        << f.width - f.right << "\" y2=\"" << f.height - f.bottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\""
        << f.height - f.bottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / ticks;
        const double yv = f.y0 + (f.y1 - f.y0) * i / ticks;
        const double px = f.px(xv);
        const double py = f.py(yv);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << f.height - f.bottom << "\" x2=\""
            << fmt(px) << "\" y2=\"" << f.height - f.bottom + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << f.height - f.bottom + 18
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
            << fmt(options.log_x ? std::exp(xv) : xv) << "</text>\n";
        out << "<line x1=\"" << f.left - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << f.left
            << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << f.left - 8 << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
            << fmt(options.log_y ? std::exp(yv) : yv) << "</text>\n";
    }
    out << "<text x=\"" << (f.left + f.width - f.right) / 2 << "\" y=\"" << f.height - 8
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
        << options.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (f.top + f.height - f.bottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << (f.top + f.height - f.bottom) / 2 << ")\">"
        << options.y_label << "</text>\n";
}

void no_data(std::ostringstream& out, const PlotOptions& options) {
    out << "<text x=\"" << options.width / 2 << "\" y=\"" << options.height / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\" fill=\"#888\">"
        << "no data</text>\n";
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options) {
    std::ostringstream out;
    open_svg(out, options);

    // Collect plottable points (log axes drop non-positive values).
    std::vector<PlotSeries> mapped;
    for (const auto& s : series) {
        PlotSeries m;
        m.label = s.label;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (options.log_x) {
                if (!(x > 0.0)) continue;
                x = std::log(x);
            }
            if (options.log_y) {
                if (!(y > 0.0)) continue;
                y = std::log(y);
            }
            m.x.push_back(x);
            m.y.push_back(y);
        }
        mapped.push_back(std::move(m));
    }
    bool any = false;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    for (const auto& m : mapped) {
        for (std::size_t i = 0; i < m.x.size(); ++i) {
            if (!any) {
                x0 = x1 = m.x[i];
                y0 = y1 = m.y[i];
                any = true;
            } else {
                x0 = std::min(x0, m.x[i]);
                x1 = std::max(x1, m.x[i]);
                y0 = std::min(y0, m.y[i]);
                y1 = std::max(y1, m.y[i]);
            }
        }
    }
    if (y1 == y0) y1 = y0 + 1.0;
    if (x1 == x0) x1 = x0 + 1.0;

    Frame frame{};
    frame.x0 = x0;
    frame.x1 = x1;
    frame.y0 = y0;
    frame.y1 = y1;
    frame.width = options.width;
    frame.height = options.height;
    draw_axes(out, frame, options);

    if (!any) {
        no_data(out, options);
        out << "</svg>\n";
        return out.str();
    }

    int color = 0;
    int legend_y = frame.top + 6;
    for (const auto& m : mapped) {
        const char* stroke = kPalette[color % 6];
        if (m.x.size() >= 2) {
            out << "<polyline fill=\"none\" stroke=\"" << stroke
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < m.x.size(); ++i) {
                if (i) out << ' ';
                out << fmt(frame.px(m.x[i])) << ',' << fmt(frame.py(m.y[i]));
            }
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < m.x.size(); ++i) {
            out << "<circle cx=\"" << fmt(frame.px(m.x[i])) << "\" cy=\"" << fmt(frame.py(m.y[i]))
                << "\" r=\"2\" fill=\"" << stroke << "\"/>\n";
        }
        out << "<text x=\"" << frame.width - frame.right - 6 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\""
            << stroke << "\">" << m.label << "</text>\n";
        legend_y += 14;
        ++color;
    }

    if (options.annotate_slope && !mapped.empty() && mapped[0].x.size() >= 2) {
        // mapped coordinates are already in log space when log axes are on.
        const auto& m = mapped[0];
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(m.x.size());
        for (std::size_t i = 0; i < m.x.size(); ++i) {
            sx += m.x[i];
            sy += m.y[i];
            sxx += m.x[i] * m.x[i];
            sxy += m.x[i] * m.y[i];
        }
        const double denom = n * sxx - sx * sx;
        if (denom != 0.0) {
            const double slope = (n * sxy - sx * sy) / denom;
            out << "<text x=\"" << frame.left + 10 << "\" y=\"" << frame.top + 6
                << "\" font-family=\"monospace\" font-size=\"12\">fitted slope = " << fmt(slope)
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_bar_plot(const std::vector<BarGroup>& bars, const PlotOptions& options) {
    std::ostringstream out;
    open_svg(out, options);
    double top_value = 0.0;
    for (const auto& b : bars) top_value = std::max({top_value, b.value, b.reference});
    if (top_value <= 0.0) top_value = 1.0;
    Frame frame{};
    frame.x0 = 0.0;
    frame.x1 = 1.0;
    frame.y0 = 0.0;
    frame.y1 = top_value * 1.15;
    frame.width = options.width;
    frame.height = options.height;
    PlotOptions axis_options = options;
    axis_options.log_x = axis_options.log_y = false;
    draw_axes(out, frame, axis_options);
    if (bars.empty()) {
        no_data(out, options);
        out << "</svg>\n";
        return out.str();
    }
    const double slot = 1.0 / static_cast<double>(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double cx = (static_cast<double>(i) + 0.5) * slot;
        const double half = slot * 0.3;
        const double px0 = frame.px(cx - half);
        const double px1 = frame.px(cx + half);
        const double py = frame.py(bars[i].value);
        out << "<rect x=\"" << fmt(px0) << "\" y=\"" << fmt(py) << "\" width=\""
            << fmt(px1 - px0) << "\" height=\"" << fmt(frame.py(0.0) - py)
            << "\" fill=\"#1f77b4\"/>\n";
        const double ref_y = frame.py(bars[i].reference);
        out << "<line x1=\"" << fmt(frame.px(cx - half * 1.4)) << "\" y1=\"" << fmt(ref_y)
            << "\" x2=\"" << fmt(frame.px(cx + half * 1.4)) << "\" y2=\"" << fmt(ref_y)
            << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(frame.px(cx)) << "\" y=\"" << frame.height - frame.bottom + 32
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
            << bars[i].label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace kucb
