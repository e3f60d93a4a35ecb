#pragma once

// Static SVG charts for sweeps: line charts and robot-to-module allocation
// strips. Output is plain text with fixed number formatting, so equal input
// gives byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modcover/integer_solver.hpp"

namespace modcover::plot {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

struct AllocationRow {
    std::string label;
    std::size_t modules = 0;
    std::vector<std::optional<Block>> blocks;
};

namespace detail {

inline const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % (sizeof palette / sizeof palette[0])];
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                        int size = 12, const char* extra = "") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape(s) + "</text>\n";
}

inline std::pair<double, double> padded_range(double lo, double hi) {
    if (!(lo < hi)) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

/// Draws one chart into the box (x0, y0, w, h).
inline std::string panel(const Panel& p, double x0, double y0, double w, double h) {
    const double left = x0 + 70, right = x0 + w - 150, top = y0 + 30, bottom = y0 + h - 45;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : p.series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    ymin = std::min(ymin, 0.0);
    std::tie(xmin, xmax) = padded_range(xmin, xmax);
    std::tie(ymin, ymax) = padded_range(ymin, ymax);
    const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
    const auto sy = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    std::string out;
    out += text(x0 + w / 2, y0 + 18, p.title, "middle", 14, " font-weight=\"bold\"");
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
           num(bottom - top) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        out += text(sx(xv), bottom + 16, tick(xv));
        out += text(left - 6, sy(yv) + 4, tick(yv), "end");
        out += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(yv)) + "\" x2=\"" + num(right) + "\" y2=\"" +
               num(sy(yv)) + "\" stroke=\"#ddd\"/>\n";
    }
    out += text((left + right) / 2, bottom + 36, p.x_label);
    out += text(x0 + 16, (top + bottom) / 2, p.y_label, "middle", 12,
                (" transform=\"rotate(-90 " + num(x0 + 16) + " " + num((top + bottom) / 2) + ")\"").c_str());

    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = p.series[k];
        std::string pts;
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            pts += num(sx(x)) + "," + num(sy(y)) + " ";
            out += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) + "\" r=\"2.5\" fill=\"" + color(k) +
                   "\"/>\n";
        }
        if (!pts.empty()) {
            pts.pop_back();
            out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color(k) + "\" stroke-width=\"1.5\"/>\n";
        }
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        out += "<rect x=\"" + num(right + 12) + "\" y=\"" + num(ly - 9) + "\" width=\"12\" height=\"10\" fill=\"" +
               color(k) + "\"/>\n";
        out += text(right + 30, ly, s.label, "start");
    }
    return out;
}

inline std::string document(double w, double h, const std::string& body) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body + "</svg>\n";
}

}  // namespace detail

/// Panels stacked vertically in one document.
inline std::string line_charts(std::span<const Panel> panels) {
    const double w = 760, h = 320;
    std::string body;
    for (std::size_t i = 0; i < panels.size(); ++i) body += detail::panel(panels[i], 0, h * static_cast<double>(i), w, h);
    return detail::document(w, h * static_cast<double>(std::max<std::size_t>(panels.size(), 1)), body);
}

/// One horizontal strip per row; module cells are colored by the robot
/// that covers them, idle robots draw nothing.
inline std::string allocation_strips(const std::string& title, std::span<const AllocationRow> rows) {
    const double w = 760, left = 120, right = 740, row_h = 18, gap = 6, top = 40;
    const double h = top + (row_h + gap) * static_cast<double>(rows.size()) + 20;
    std::string body = detail::text(w / 2, 22, title, "middle", 14, " font-weight=\"bold\"");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const double y = top + (row_h + gap) * static_cast<double>(r);
        body += detail::text(left - 8, y + row_h - 4, row.label, "end");
        const double cell = row.modules == 0 ? 0.0 : (right - left) / static_cast<double>(row.modules);
        for (std::size_t k = 0; k < row.blocks.size(); ++k) {
            const auto& b = row.blocks[k];
            if (!b) continue;
            const double x = left + cell * static_cast<double>(b->first - 1);
            const double bw = cell * static_cast<double>(b->last - b->first + 1);
            body += "<rect x=\"" + detail::num(x) + "\" y=\"" + detail::num(y) + "\" width=\"" + detail::num(bw) +
                    "\" height=\"" + detail::num(row_h) + "\" fill=\"" + detail::color(k) +
                    "\" stroke=\"white\" stroke-width=\"1\"><title>robot " + std::to_string(k) + ": modules " +
                    std::to_string(b->first) + "-" + std::to_string(b->last) + "</title></rect>\n";
        }
    }
    return detail::document(w, h, body);
}

}  // namespace modcover::plot
