#ifndef LPSIM_SVG_HPP
#define LPSIM_SVG_HPP

#include <string>
#include <vector>

namespace lpsim {

/// Self-contained SVG chart rendering: line charts, box plots, and heatmaps,
/// enough to eyeball experiment outputs without a plotting stack. Output is
/// deterministic (no timestamps, fixed formatting); the numbers behind every
/// chart are always co-emitted as CSV, the chart is never the source of truth.

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

struct LineChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    int width = 860;
    int height = 520;
};

std::string svg_line_chart(const LineChartOptions& options, const std::vector<Series>& series);

struct BoxStats {
    std::string label;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct BoxPlotOptions {
    std::string title;
    std::string y_label;
    int width = 860;
    int height = 520;
};

std::string svg_box_plot(const BoxPlotOptions& options, const std::vector<BoxStats>& boxes);

struct HeatmapOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int cell_size = 64;
};

/// values[r][c] aligned with row_labels[r] / col_labels[c]; NaN renders as an
/// inapplicable (gray) cell.
struct HeatmapData {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> values;
};

std::string svg_heatmap(const HeatmapOptions& options, const HeatmapData& data);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lpsim

#endif
