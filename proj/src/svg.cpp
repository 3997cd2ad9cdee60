#include "lpsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lpsim/csv.hpp"
#include "lpsim/errors.hpp"

namespace lpsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr size_t kPaletteCount = sizeof(kPalette) / sizeof(kPalette[0]);

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

std::string px(double v) { return format_double(v, 5); }

struct Range {
    double lo = 0, hi = 1;
    double span() const { return hi - lo; }
};

Range padded(double lo, double hi, double pad_fraction = 0.05) {
    if (!(hi > lo)) {
        const double bump = std::max(1.0, std::abs(lo)) * 0.5;
        return {lo - bump, hi + bump};
    }
    const double pad = (hi - lo) * pad_fraction;
    return {lo - pad, hi + pad};
}

/// "Nice" tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi, int target = 6) {
    const double raw = (hi - lo) / std::max(1, target - 1);
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    double step = magnitude;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (magnitude * mult >= raw) {
            step = magnitude * mult;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ticks;
}

std::vector<double> decade_ticks(double lo, double hi) {
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(std::log10(lo)));
         e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
        const double t = std::pow(10.0, e);
        if (t >= lo * (1 - 1e-9) && t <= hi * (1 + 1e-9)) ticks.push_back(t);
    }
    return ticks;
}

struct Frame {
    double left, right, top, bottom;  // plot-area pixel bounds
    Range x, y;
    bool log_x = false;

    double map_x(double v) const {
        const double t = log_x ? (std::log10(v) - std::log10(x.lo)) /
                                     (std::log10(x.hi) - std::log10(x.lo))
                               : (v - x.lo) / x.span();
        return left + t * (right - left);
    }
    double map_y(double v) const {
        return bottom - (v - y.lo) / y.span() * (bottom - top);
    }
};

void open_svg(std::ostringstream& out, int width, int height) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<style>text{font-family:sans-serif;fill:#222}</style>\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
}

void draw_title(std::ostringstream& out, int width, const std::string& title) {
    out << "<text x=\"" << width / 2 << "\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">"
        << esc(title) << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, const std::string& x_label,
               const std::string& y_label) {
    out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(f.bottom) << "\" x2=\""
        << px(f.right) << "\" y2=\"" << px(f.bottom) << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(f.top) << "\" x2=\"" << px(f.left)
        << "\" y2=\"" << px(f.bottom) << "\" stroke=\"#444\"/>\n";

    const auto x_ticks = f.log_x ? decade_ticks(f.x.lo, f.x.hi) : linear_ticks(f.x.lo, f.x.hi);
    for (double t : x_ticks) {
        const double x = f.map_x(t);
        out << "<line x1=\"" << px(x) << "\" y1=\"" << px(f.bottom) << "\" x2=\"" << px(x)
            << "\" y2=\"" << px(f.bottom + 5) << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << px(f.bottom + 20)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(t, 4)
            << "</text>\n";
    }
    for (double t : linear_ticks(f.y.lo, f.y.hi)) {
        const double y = f.map_y(t);
        out << "<line x1=\"" << px(f.left - 5) << "\" y1=\"" << px(y) << "\" x2=\""
            << px(f.right) << "\" y2=\"" << px(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << px(f.left - 8) << "\" y=\"" << px(y + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(t, 4)
            << "</text>\n";
    }

    const double mid_x = (f.left + f.right) / 2;
    out << "<text x=\"" << px(mid_x) << "\" y=\"" << px(f.bottom + 42)
        << "\" font-size=\"13\" text-anchor=\"middle\">" << esc(x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << px((f.top + f.bottom) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << px((f.top + f.bottom) / 2) << ")\">" << esc(y_label) << "</text>\n";
}

}  // namespace

std::string svg_line_chart(const LineChartOptions& options, const std::vector<Series>& series) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const Series& s : series)
        for (auto [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (!std::isfinite(x_lo)) {
        x_lo = 0;
        x_hi = 1;
        y_lo = 0;
        y_hi = 1;
    }

    Frame f;
    f.left = 70;
    f.right = options.width - 170.0;
    f.top = 44;
    f.bottom = options.height - 64.0;
    f.log_x = options.log_x;
    f.x = options.log_x ? Range{x_lo, x_hi} : padded(x_lo, x_hi, 0.02);
    f.y = padded(y_lo, y_hi);

    std::ostringstream out;
    open_svg(out, options.width, options.height);
    draw_title(out, options.width, options.title);
    draw_axes(out, f, options.x_label, options.y_label);

    for (size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % kPaletteCount];
        std::ostringstream pts;
        for (auto [x, y] : series[i].points) pts << px(f.map_x(x)) << "," << px(f.map_y(y)) << " ";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\""
            << pts.str() << "\"/>\n";
        for (auto [x, y] : series[i].points)
            out << "<circle cx=\"" << px(f.map_x(x)) << "\" cy=\"" << px(f.map_y(y))
                << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
        const double ly = f.top + 18.0 * static_cast<double>(i);
        out << "<line x1=\"" << px(f.right + 12) << "\" y1=\"" << px(ly) << "\" x2=\""
            << px(f.right + 34) << "\" y2=\"" << px(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << px(f.right + 40) << "\" y=\"" << px(ly + 4)
            << "\" font-size=\"12\">" << esc(series[i].label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_box_plot(const BoxPlotOptions& options, const std::vector<BoxStats>& boxes) {
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    for (const BoxStats& b : boxes) {
        y_lo = std::min(y_lo, b.min);
        y_hi = std::max(y_hi, b.max);
    }
    if (!std::isfinite(y_lo)) {
        y_lo = 0;
        y_hi = 1;
    }

    Frame f;
    f.left = 70;
    f.right = options.width - 40.0;
    f.top = 44;
    f.bottom = options.height - 64.0;
    f.x = {0.0, static_cast<double>(boxes.size())};
    f.y = padded(y_lo, y_hi);

    std::ostringstream out;
    open_svg(out, options.width, options.height);
    draw_title(out, options.width, options.title);
    draw_axes(out, f, "", options.y_label);

    const double slot = (f.right - f.left) / std::max<size_t>(1, boxes.size());
    const double half_width = std::min(34.0, slot * 0.3);
    for (size_t i = 0; i < boxes.size(); ++i) {
        const BoxStats& b = boxes[i];
        const double cx = f.left + slot * (static_cast<double>(i) + 0.5);
        const char* color = kPalette[i % kPaletteCount];
        out << "<line x1=\"" << px(cx) << "\" y1=\"" << px(f.map_y(b.min)) << "\" x2=\""
            << px(cx) << "\" y2=\"" << px(f.map_y(b.max)) << "\" stroke=\"#555\"/>\n";
        for (double whisker : {b.min, b.max})
            out << "<line x1=\"" << px(cx - half_width * 0.6) << "\" y1=\""
                << px(f.map_y(whisker)) << "\" x2=\"" << px(cx + half_width * 0.6)
                << "\" y2=\"" << px(f.map_y(whisker)) << "\" stroke=\"#555\"/>\n";
        out << "<rect x=\"" << px(cx - half_width) << "\" y=\"" << px(f.map_y(b.q3))
            << "\" width=\"" << px(half_width * 2) << "\" height=\""
            << px(std::max(0.5, f.map_y(b.q1) - f.map_y(b.q3))) << "\" fill=\"" << color
            << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
        out << "<line x1=\"" << px(cx - half_width) << "\" y1=\"" << px(f.map_y(b.median))
            << "\" x2=\"" << px(cx + half_width) << "\" y2=\"" << px(f.map_y(b.median))
            << "\" stroke=\"" << color << "\" stroke-width=\"2.4\"/>\n";
        out << "<text x=\"" << px(cx) << "\" y=\"" << px(f.bottom + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << esc(b.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_heatmap(const HeatmapOptions& options, const HeatmapData& data) {
    const size_t rows = data.row_labels.size();
    const size_t cols = data.col_labels.size();
    const double cell = options.cell_size;
    const double left = 90, top = 70;
    const int width = static_cast<int>(left + cell * static_cast<double>(cols) + 40);
    const int height = static_cast<int>(top + cell * static_cast<double>(rows) + 70);

    double v_lo = std::numeric_limits<double>::infinity(), v_hi = -v_lo;
    for (const auto& row : data.values)
        for (double v : row)
            if (std::isfinite(v)) {
                v_lo = std::min(v_lo, v);
                v_hi = std::max(v_hi, v);
            }
    if (!std::isfinite(v_lo)) {
        v_lo = 0;
        v_hi = 1;
    }
    if (v_hi <= v_lo) v_hi = v_lo + 1;

    auto color_of = [&](double v) {
        const double t = std::clamp((v - v_lo) / (v_hi - v_lo), 0.0, 1.0);
        const int r = static_cast<int>(255 + t * (203 - 255));
        const int g = static_cast<int>(247 + t * (24 - 247));
        const int b = static_cast<int>(243 + t * (29 - 243));
        std::ostringstream c;
        c << "rgb(" << r << "," << g << "," << b << ")";
        return c.str();
    };

    std::ostringstream out;
    open_svg(out, width, height);
    draw_title(out, width, options.title);

    for (size_t c = 0; c < cols; ++c)
        out << "<text x=\"" << px(left + cell * (static_cast<double>(c) + 0.5)) << "\" y=\""
            << px(top - 10) << "\" font-size=\"12\" text-anchor=\"middle\">"
            << esc(data.col_labels[c]) << "</text>\n";
    for (size_t r = 0; r < rows; ++r)
        out << "<text x=\"" << px(left - 10) << "\" y=\""
            << px(top + cell * (static_cast<double>(r) + 0.5) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << esc(data.row_labels[r])
            << "</text>\n";

    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            const double v = data.values[r][c];
            const double x = left + cell * static_cast<double>(c);
            const double y = top + cell * static_cast<double>(r);
            const bool applicable = std::isfinite(v);
            out << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(cell)
                << "\" height=\"" << px(cell) << "\" fill=\""
                << (applicable ? color_of(v) : std::string("#e8e8e8"))
                << "\" stroke=\"#999\"/>\n";
            out << "<text x=\"" << px(x + cell / 2) << "\" y=\"" << px(y + cell / 2 + 4)
                << "\" font-size=\"12\" text-anchor=\"middle\">"
                << (applicable ? format_double(v, 3) : std::string("n/a")) << "</text>\n";
        }
    }

    out << "<text x=\"" << px(left + cell * static_cast<double>(cols) / 2) << "\" y=\""
        << px(top + cell * static_cast<double>(rows) + 36)
        << "\" font-size=\"13\" text-anchor=\"middle\">" << esc(options.x_label) << "</text>\n";
    out << "<text x=\"24\" y=\"" << px(top + cell * static_cast<double>(rows) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 24 "
        << px(top + cell * static_cast<double>(rows) / 2) << ")\">" << esc(options.y_label)
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << content;
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace lpsim
