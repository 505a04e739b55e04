#include "hitr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace hitr {

namespace {

// Fixed palette; cycles when there are more series than colors.
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
constexpr int kPaletteSize = 10;

std::string px(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

// Largest "nice" step (1, 2, or 5 times a power of ten) that yields at
// most the requested number of intervals over the range.
double nice_step(double range, int max_intervals) {
    if (range <= 0.0) {
        return 1.0;
    }
    const double raw = range / static_cast<double>(max_intervals);
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (magnitude * m >= raw) {
            return magnitude * m;
        }
    }
    return magnitude * 10.0;
}

std::vector<double> axis_ticks(double lo, double hi, int max_intervals) {
    const double step = nice_step(hi - lo, max_intervals);
    std::vector<double> ticks;
    double tick = std::ceil(lo / step) * step;
    for (; tick <= hi + step * 1e-9; tick += step) {
        ticks.push_back(std::abs(tick) < step * 1e-9 ? 0.0 : tick);
    }
    return ticks;
}

struct Canvas {
    double width = 0.0;
    double height = 0.0;
    double left = 0.0;
    double right = 0.0; // x pixel of the plot's right edge
    double top = 0.0;
    double bottom = 0.0; // y pixel of the plot's bottom edge
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;

    double map_x(double x) const {
        return left + (x - x_lo) / (x_hi - x_lo) * (right - left);
    }
    double map_y(double y) const {
        return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top);
    }
};

void open_svg(std::ostream& out, double width, double height) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
        << px(height) << "\" viewBox=\"0 0 " << px(width) << ' ' << px(height) << "\">\n"
        << "<rect width=\"" << px(width) << "\" height=\"" << px(height)
        << "\" fill=\"white\"/>\n";
}

void draw_frame(std::ostream& out, const Canvas& c, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
    out << "<line x1=\"" << px(c.left) << "\" y1=\"" << px(c.bottom) << "\" x2=\"" << px(c.right)
        << "\" y2=\"" << px(c.bottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px(c.left) << "\" y1=\"" << px(c.top) << "\" x2=\"" << px(c.left)
        << "\" y2=\"" << px(c.bottom) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px((c.left + c.right) / 2.0) << "\" y=\"" << px(c.top - 14.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << title
        << "</text>\n";
    if (!x_label.empty()) {
        out << "<text x=\"" << px((c.left + c.right) / 2.0) << "\" y=\"" << px(c.bottom + 38.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
            << "</text>\n";
    }
    out << "<text x=\"" << px(c.left - 48.0) << "\" y=\"" << px((c.top + c.bottom) / 2.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 " << px(c.left - 48.0) << ' ' << px((c.top + c.bottom) / 2.0)
        << ")\">" << y_label << "</text>\n";
}

void draw_x_ticks(std::ostream& out, const Canvas& c, const std::vector<double>& ticks) {
    for (double tick : ticks) {
        const double x = c.map_x(tick);
        out << "<line x1=\"" << px(x) << "\" y1=\"" << px(c.bottom) << "\" x2=\"" << px(x)
            << "\" y2=\"" << px(c.bottom + 5.0) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << px(c.bottom + 18.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_sig(tick) << "</text>\n";
    }
}

void draw_y_ticks(std::ostream& out, const Canvas& c, const std::vector<double>& ticks,
                  bool gridlines) {
    for (double tick : ticks) {
        const double y = c.map_y(tick);
        out << "<line x1=\"" << px(c.left - 5.0) << "\" y1=\"" << px(y) << "\" x2=\""
            << px(c.left) << "\" y2=\"" << px(y) << "\" stroke=\"black\"/>\n";
        if (gridlines) {
            out << "<line x1=\"" << px(c.left) << "\" y1=\"" << px(y) << "\" x2=\"" << px(c.right)
                << "\" y2=\"" << px(y) << "\" stroke=\"#dddddd\"/>\n";
        }
        out << "<text x=\"" << px(c.left - 9.0) << "\" y=\"" << px(y + 3.5)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_sig(tick) << "</text>\n";
    }
}

} // namespace

void write_curve_chart_svg(const std::vector<HitRateCurve>& curves,
                           const std::filesystem::path& path) {
    if (curves.empty()) {
        throw Error("no curves to plot");
    }
    double r_lo = std::numeric_limits<double>::infinity();
    double r_hi = -std::numeric_limits<double>::infinity();
    for (const auto& curve : curves) {
        if (curve.samples.empty()) {
            throw Error("empty curve " + curve.algorithm_id);
        }
        r_lo = std::min(r_lo, curve.samples.front().radius);
        r_hi = std::max(r_hi, curve.samples.back().radius);
    }
    if (r_hi == r_lo) {
        r_hi = r_lo + 1.0; // degenerate single-radius data
    }

    Canvas c;
    c.width = 880.0;
    c.height = 520.0;
    c.left = 70.0;
    c.right = c.width - 210.0;
    c.top = 50.0;
    c.bottom = c.height - 70.0;
    c.x_lo = r_lo;
    c.x_hi = r_hi;
    c.y_lo = 0.0;
    c.y_hi = 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    open_svg(out, c.width, c.height);
    draw_y_ticks(out, c, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, true);
    draw_x_ticks(out, c, axis_ticks(c.x_lo, c.x_hi, 10));
    draw_frame(out, c, "Landmark hit rate vs radius", "radius [mm]", "hit rate");

    int color_index = 0;
    for (const auto& curve : curves) {
        const char* color = kPalette[color_index % kPaletteSize];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& s : curve.samples) {
            out << px(c.map_x(s.radius)) << ',' << px(c.map_y(s.hit_rate)) << ' ';
        }
        out << "\"/>\n";
        for (const auto& s : curve.samples) {
            out << "<circle cx=\"" << px(c.map_x(s.radius)) << "\" cy=\""
                << px(c.map_y(s.hit_rate)) << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
        }
        const double legend_y = c.top + 16.0 + 20.0 * color_index;
        out << "<line x1=\"" << px(c.right + 14.0) << "\" y1=\"" << px(legend_y - 4.0)
            << "\" x2=\"" << px(c.right + 40.0) << "\" y2=\"" << px(legend_y - 4.0)
            << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
        out << "<text x=\"" << px(c.right + 46.0) << "\" y=\"" << px(legend_y)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << curve.algorithm_id
            << "</text>\n";
        ++color_index;
    }
    out << "</svg>\n";
}

void write_box_chart_svg(const std::vector<std::pair<std::string, SummaryStats>>& summaries,
                         const std::string& title, const std::string& y_label,
                         const std::filesystem::path& path) {
    if (summaries.empty()) {
        throw Error("no summaries to plot");
    }
    double y_hi = 0.0;
    for (const auto& [_, stats] : summaries) {
        y_hi = std::max(y_hi, stats.max);
    }
    if (y_hi <= 0.0) {
        y_hi = 1.0;
    }

    Canvas c;
    c.width = std::max(420.0, 90.0 + 110.0 * static_cast<double>(summaries.size()));
    c.height = 460.0;
    c.left = 80.0;
    c.right = c.width - 30.0;
    c.top = 50.0;
    c.bottom = c.height - 70.0;
    c.x_lo = 0.0;
    c.x_hi = static_cast<double>(summaries.size());
    c.y_lo = 0.0;
    c.y_hi = y_hi * 1.05;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    open_svg(out, c.width, c.height);
    draw_y_ticks(out, c, axis_ticks(c.y_lo, c.y_hi, 8), true);
    draw_frame(out, c, title, "", y_label);

    const double slot = (c.right - c.left) / static_cast<double>(summaries.size());
    const double half_box = std::min(32.0, slot * 0.3);
    int color_index = 0;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& [label, stats] = summaries[i];
        const char* color = kPalette[color_index % kPaletteSize];
        const double cx = c.left + slot * (static_cast<double>(i) + 0.5);
        const double y_min = c.map_y(stats.min);
        const double y_q1 = c.map_y(stats.q1);
        const double y_med = c.map_y(stats.median);
        const double y_q3 = c.map_y(stats.q3);
        const double y_max = c.map_y(stats.max);
        // whiskers with caps
        out << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y_min) << "\" x2=\"" << px(cx)
            << "\" y2=\"" << px(y_q1) << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y_q3) << "\" x2=\"" << px(cx)
            << "\" y2=\"" << px(y_max) << "\" stroke=\"black\"/>\n";
        for (double y : {y_min, y_max}) {
            out << "<line x1=\"" << px(cx - half_box * 0.6) << "\" y1=\"" << px(y) << "\" x2=\""
                << px(cx + half_box * 0.6) << "\" y2=\"" << px(y) << "\" stroke=\"black\"/>\n";
        }
        out << "<rect x=\"" << px(cx - half_box) << "\" y=\"" << px(y_q3) << "\" width=\""
            << px(half_box * 2.0) << "\" height=\"" << px(y_q1 - y_q3) << "\" fill=\"" << color
            << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
        out << "<line x1=\"" << px(cx - half_box) << "\" y1=\"" << px(y_med) << "\" x2=\""
            << px(cx + half_box) << "\" y2=\"" << px(y_med) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << px(cx) << "\" y=\"" << px(c.bottom + 18.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << label
            << "</text>\n";
        ++color_index;
    }
    out << "</svg>\n";
}

} // namespace hitr
