#include "agingkit/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "agingkit/error.hpp"

namespace agingkit::chart {

namespace {

constexpr int kLeft = 70;
constexpr int kRight = 20;
constexpr int kTop = 40;
constexpr int kPanelGap = 50;
constexpr int kBottom = 45;

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string label(double v) {
    if (v == 0.0) {
        return "0";
    }
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::string coord(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    Range padded() const {
        Range r = *this;
        if (!std::isfinite(r.lo)) {
            return {0.0, 1.0};
        }
        if (r.hi == r.lo) {
            const double pad = r.lo == 0.0 ? 1.0 : std::abs(r.lo) * 0.1;
            return {r.lo - pad, r.hi + pad};
        }
        return r;
    }
};

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
    if (!(hi > lo) || target < 1) {
        return {lo};
    }
    const double raw = (hi - lo) / target;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    double step = magnitude;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * magnitude;
        if (step >= raw) {
            break;
        }
    }
    std::vector<double> ticks;
    const double first = std::ceil(lo / step - 1e-9);
    for (double k = first; k * step <= hi + step * 1e-9; k += 1.0) {
        const double v = k * step;
        ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    }
    return ticks;
}

std::string render_svg(const Chart& chart) {
    if (chart.panels.empty()) {
        throw DomainError("chart needs at least one panel");
    }
    Range xr;
    for (const auto& p : chart.panels) {
        for (const auto& l : p.lines) {
            if (l.x.size() != l.y.size()) {
                throw DomainError("chart line '" + l.label + "' has mismatched x and y");
            }
            for (double v : l.x) {
                xr.add(v);
            }
        }
    }
    if (chart.marker_x) {
        xr.add(*chart.marker_x);
    }
    xr = xr.padded();

    const int n = static_cast<int>(chart.panels.size());
    const int height = kTop + n * chart.panel_height + (n - 1) * kPanelGap + kBottom;
    const double plot_w = chart.width - kLeft - kRight;
    auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << chart.width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << chart.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(chart.title) << "</text>\n";

    const auto x_ticks = nice_ticks(xr.lo, xr.hi);
    for (int i = 0; i < n; ++i) {
        const auto& panel = chart.panels[static_cast<std::size_t>(i)];
        const double top = kTop + i * (chart.panel_height + kPanelGap);
        const double bottom = top + chart.panel_height;
        Range yr;
        for (const auto& l : panel.lines) {
            for (double v : l.y) {
                yr.add(v);
            }
        }
        if (panel.zero_line) {
            yr.add(0.0);
        }
        yr = yr.padded();
        auto sy = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * chart.panel_height; };

        svg << "<g class=\"panel\">\n";
        svg << "<text x=\"" << kLeft << "\" y=\"" << coord(top - 6) << "\" font-size=\"12\">" << escape(panel.title)
            << "</text>\n";
        svg << "<rect x=\"" << kLeft << "\" y=\"" << coord(top) << "\" width=\"" << coord(plot_w) << "\" height=\""
            << chart.panel_height << "\" fill=\"none\" stroke=\"#333\"/>\n";

        svg << "<g class=\"y-axis\">\n";
        for (double t : nice_ticks(yr.lo, yr.hi)) {
            const auto y = coord(sy(t));
            svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
                << "\" stroke=\"#333\"/>"
                << "<text x=\"" << kLeft - 6 << "\" y=\"" << y << "\" text-anchor=\"end\" dy=\"3\">" << label(t)
                << "</text>\n";
        }
        svg << "<text transform=\"translate(14," << coord((top + bottom) / 2)
            << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";
        svg << "</g>\n";

        svg << "<g class=\"x-axis\">\n";
        for (double t : x_ticks) {
            const auto x = coord(sx(t));
            svg << "<line x1=\"" << x << "\" y1=\"" << coord(bottom) << "\" x2=\"" << x << "\" y2=\""
                << coord(bottom + 4) << "\" stroke=\"#333\"/>"
                << "<text x=\"" << x << "\" y=\"" << coord(bottom + 16) << "\" text-anchor=\"middle\">" << label(t)
                << "</text>\n";
        }
        svg << "</g>\n";

        if (panel.zero_line) {
            const auto y = coord(sy(0.0));
            svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << coord(kLeft + plot_w) << "\" y2=\"" << y
                << "\" stroke=\"#999\" stroke-dasharray=\"2,2\"/>\n";
        }

        for (std::size_t li = 0; li < panel.lines.size(); ++li) {
            const auto& l = panel.lines[li];
            svg << "<polyline class=\"line\" fill=\"none\" stroke=\"" << escape(l.color) << "\" stroke-width=\"1.2\"";
            if (l.dashed) {
                svg << " stroke-dasharray=\"5,3\"";
            }
            svg << " points=\"";
            for (std::size_t k = 0; k < l.x.size(); ++k) {
                if (std::isfinite(l.x[k]) && std::isfinite(l.y[k])) {
                    svg << coord(sx(l.x[k])) << ',' << coord(sy(l.y[k])) << ' ';
                }
            }
            svg << "\"/>\n";
            const double ly = top + 14 + 14 * static_cast<double>(li);
            const double lx = kLeft + plot_w - 150;
            svg << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly - 4) << "\" x2=\"" << coord(lx + 20)
                << "\" y2=\"" << coord(ly - 4) << "\" stroke=\"" << escape(l.color) << "\"/>"
                << "<text x=\"" << coord(lx + 24) << "\" y=\"" << coord(ly) << "\">" << escape(l.label)
                << "</text>\n";
        }

        if (chart.marker_x) {
            const auto x = coord(sx(*chart.marker_x));
            svg << "<line class=\"marker\" x1=\"" << x << "\" y1=\"" << coord(top) << "\" x2=\"" << x << "\" y2=\""
                << coord(bottom) << "\" stroke=\"#d62728\" stroke-dasharray=\"4,2\"/>\n";
            if (i == 0 && !chart.marker_label.empty()) {
                svg << "<text x=\"" << x << "\" y=\"" << coord(top + 12) << "\" dx=\"4\" fill=\"#d62728\">"
                    << escape(chart.marker_label) << "</text>\n";
            }
        }
        svg << "</g>\n";
    }
    svg << "<text x=\"" << coord(kLeft + plot_w / 2) << "\" y=\"" << height - 8 << "\" text-anchor=\"middle\">"
        << escape(chart.x_label) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace agingkit::chart
