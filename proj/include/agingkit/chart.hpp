#pragma once

#include <optional>
#include <string>
#include <vector>

// Minimal SVG line charts: stacked panels sharing one x range.
namespace agingkit::chart {

struct Line {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string y_label;
    std::vector<Line> lines;
    /// Draw a horizontal reference at y = 0 (residual plots).
    bool zero_line = false;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::vector<Panel> panels;
    std::optional<double> marker_x;
    std::string marker_label;
    int width = 800;
    int panel_height = 220;
};

/// Round tick positions covering [lo, hi], roughly `target` of them.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

/// Standalone SVG document. Throws DomainError for a chart without panels
/// or a line whose x and y differ in length.
std::string render_svg(const Chart& chart);

}  // namespace agingkit::chart
