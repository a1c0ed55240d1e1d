#pragma once

// Minimal deterministic SVG line charts (diffable text, no renderer needed).

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gripforge/text.hpp"

namespace gripforge::svg {

struct Point {
    double x;
    double y;
};

struct Series {
    std::string name;
    std::string color;
    std::vector<Point> points;
};

// Shaded x-interval, e.g. a task step.
struct Band {
    double x0;
    double x1;
    std::string color;
    std::string label;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<Band> bands;
    double width = 640;
    double height = 400;
};

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors;
}

inline const std::vector<std::string>& band_palette() {
    static const std::vector<std::string> colors{"#fde0dd", "#e0f3db", "#deebf7", "#fff7bc"};
    return colors;
}

namespace detail {
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
inline std::string num(double v) { return text::format_fixed(v, 2); }
}  // namespace detail

inline std::string render(const LineChart& chart) {
    using detail::num;
    constexpr double left = 70, right = 150, top = 40, bottom = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = 0.0, ymax = -std::numeric_limits<double>::infinity();
    for (const auto& s : chart.series) {
        for (const auto& p : s.points) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    }
    for (const auto& b : chart.bands) {
        xmin = std::min(xmin, b.x0);
        xmax = std::max(xmax, b.x1);
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
    if (!std::isfinite(ymax)) ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    ymax *= 1.05;

    const double pw = chart.width - left - right;
    const double ph = chart.height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(chart.width) << "\" height=\""
      << num(chart.height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(chart.width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape(chart.title) << "</text>\n";
    for (const auto& b : chart.bands) {
        o << "<rect x=\"" << num(sx(b.x0)) << "\" y=\"" << num(top) << "\" width=\""
          << num(sx(b.x1) - sx(b.x0)) << "\" height=\"" << num(ph) << "\" fill=\"" << b.color
          << "\" opacity=\"0.6\"><title>" << detail::escape(b.label) << "</title></rect>\n";
        o << "<text x=\"" << num((sx(b.x0) + sx(b.x1)) / 2) << "\" y=\"" << num(top + 12)
          << "\" text-anchor=\"middle\">" << detail::escape(b.label) << "</text>\n";
    }
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw)
      << "\" y2=\"" << num(top + ph) << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(top + ph) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(top + ph + 15) << "\" text-anchor=\"middle\">"
          << text::format_fixed(xv, 1) << "</text>\n";
        o << "<text x=\"" << num(left - 5) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">"
          << text::format_fixed(yv, 1) << "</text>\n";
    }
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(chart.height - 10)
      << "\" text-anchor=\"middle\">" << detail::escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(15," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.points.size(); ++k) {
            o << (k ? " " : "") << num(sx(s.points[k].x)) << ',' << num(sy(s.points[k].y));
        }
        o << "\"/>\n";
        const double ly = top + 15 + 16 * static_cast<double>(i);
        o << "<line x1=\"" << num(left + pw + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 30)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << num(left + pw + 35) << "\" y=\"" << num(ly + 4) << "\">"
          << detail::escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace gripforge::svg
