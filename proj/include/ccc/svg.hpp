#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/io.hpp"

namespace ccc {
namespace svg {

// Self-contained SVG plotting: polyline charts with axis ticks and a legend,
// and a rectangular heat map.  No external plotting dependency.

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

namespace detail {

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1b6ca8", "#c23b22", "#2e8540", "#8a4fbd", "#b8860b", "#444444"};
    return colors[i % 6];
}

inline std::vector<double> ticks(double lo, double hi, int want = 6) {
    std::vector<double> out;
    if (!(hi > lo)) {
        out.push_back(lo);
        return out;
    }
    double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / want)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (span / (step * mult) <= want) {
            step *= mult;
            break;
        }
    }
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * span; v += step) out.push_back(v);
    return out;
}

inline std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Polyline chart.  With log_y, non-positive values are clamped to one decade
/// below the smallest positive value.
inline std::string line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, std::vector<Series> series,
                              bool log_y = false) {
    if (series.empty()) throw ConfigError("line chart needs at least one series");
    const double width = 760, height = 480;
    const double ml = 70, mr = 160, mt = 40, mb = 50;

    if (log_y) {
        double min_pos = std::numeric_limits<double>::infinity();
        for (const auto& s : series)
            for (double v : s.y)
                if (v > 0.0) min_pos = std::min(min_pos, v);
        if (!std::isfinite(min_pos)) min_pos = 1e-12;
        for (auto& s : series)
            for (double& v : s.y) v = std::log10(std::max(v, min_pos / 10.0));
    }

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        for (double v : s.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
        for (double v : s.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
    }
    if (!(x_hi > x_lo)) { x_lo -= 0.5; x_hi += 0.5; }
    if (!(y_hi > y_lo)) { y_lo -= 0.5; y_hi += 0.5; }
    double pad = 0.04 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto px = [&](double v) { return ml + (v - x_lo) / (x_hi - x_lo) * (width - ml - mr); };
    auto py = [&](double v) { return height - mb - (v - y_lo) / (y_hi - y_lo) * (height - mt - mb); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_double(width) +
           "\" height=\"" + fmt_double(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt_double(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           detail::esc(title) + "</text>\n";

    for (double t : detail::ticks(x_lo, x_hi)) {
        double x = px(t);
        out += "<line x1=\"" + fmt_double(x) + "\" y1=\"" + fmt_double(height - mb) + "\" x2=\"" +
               fmt_double(x) + "\" y2=\"" + fmt_double(mt) + "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(height - mb + 18) +
               "\" text-anchor=\"middle\">" + fmt_double(t) + "</text>\n";
    }
    for (double t : detail::ticks(y_lo, y_hi)) {
        double y = py(t);
        out += "<line x1=\"" + fmt_double(ml) + "\" y1=\"" + fmt_double(y) + "\" x2=\"" +
               fmt_double(width - mr) + "\" y2=\"" + fmt_double(y) + "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + fmt_double(ml - 8) + "\" y=\"" + fmt_double(y + 4) +
               "\" text-anchor=\"end\">" + fmt_double(t) + "</text>\n";
    }
    out += "<rect x=\"" + fmt_double(ml) + "\" y=\"" + fmt_double(mt) + "\" width=\"" +
           fmt_double(width - ml - mr) + "\" height=\"" + fmt_double(height - mt - mb) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt_double((ml + width - mr) / 2) + "\" y=\"" + fmt_double(height - 10) +
           "\" text-anchor=\"middle\">" + detail::esc(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + fmt_double((mt + height - mb) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt_double((mt + height - mb) / 2) + ")\">" +
           detail::esc(log_y ? "log10 " + y_label : y_label) + "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        std::string pts;
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            if (j) pts += ' ';
            pts += fmt_double(px(s.x[j])) + "," + fmt_double(py(s.y[j]));
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               detail::palette(i) + "\" stroke-width=\"1.6\"/>\n";
        double ly = mt + 16 + 18 * static_cast<double>(i);
        out += "<line x1=\"" + fmt_double(width - mr + 10) + "\" y1=\"" + fmt_double(ly - 4) +
               "\" x2=\"" + fmt_double(width - mr + 34) + "\" y2=\"" + fmt_double(ly - 4) +
               "\" stroke=\"" + detail::palette(i) + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt_double(width - mr + 40) + "\" y=\"" + fmt_double(ly) + "\">" +
               detail::esc(s.name) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

/// Heat map over a rectangular grid; values[i][j] belongs to (ys[i], xs[j]).
inline std::string heat_map(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<double>& xs,
                            const std::vector<double>& ys,
                            const std::vector<std::vector<double>>& values) {
    if (xs.empty() || ys.empty() || values.size() != ys.size())
        throw ConfigError("heat map dimensions are inconsistent");
    const double width = 760, height = 480;
    const double ml = 70, mr = 110, mt = 40, mb = 50;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : values)
        for (double v : row) { lo = std::min(lo, v); hi = std::max(hi, v); }
    if (!(hi > lo)) hi = lo + 1.0;

    auto color = [&](double v) {
        double w = (v - lo) / (hi - lo);
        int r = static_cast<int>(37 + w * (194 - 37));
        int g = static_cast<int>(52 + w * (66 - 52));
        int b = static_cast<int>(148 - w * (148 - 34));
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    double cw = (width - ml - mr) / static_cast<double>(xs.size());
    double ch = (height - mt - mb) / static_cast<double>(ys.size());
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_double(width) +
           "\" height=\"" + fmt_double(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt_double(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           detail::esc(title) + "</text>\n";
    for (std::size_t i = 0; i < ys.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            double v = values[i][j];
            double x = ml + cw * static_cast<double>(j);
            double y = height - mb - ch * static_cast<double>(i + 1);
            out += "<rect x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(y) + "\" width=\"" +
                   fmt_double(cw) + "\" height=\"" + fmt_double(ch) + "\" fill=\"" + color(v) +
                   "\"><title>" + fmt_double(v) + "</title></rect>\n";
        }
    }
    for (std::size_t j = 0; j < xs.size(); ++j)
        out += "<text x=\"" + fmt_double(ml + cw * (static_cast<double>(j) + 0.5)) + "\" y=\"" +
               fmt_double(height - mb + 18) + "\" text-anchor=\"middle\">" + fmt_double(xs[j]) +
               "</text>\n";
    for (std::size_t i = 0; i < ys.size(); ++i)
        out += "<text x=\"" + fmt_double(ml - 8) + "\" y=\"" +
               fmt_double(height - mb - ch * (static_cast<double>(i) + 0.5) + 4) +
               "\" text-anchor=\"end\">" + fmt_double(ys[i]) + "</text>\n";
    out += "<text x=\"" + fmt_double((ml + width - mr) / 2) + "\" y=\"" + fmt_double(height - 10) +
           "\" text-anchor=\"middle\">" + detail::esc(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + fmt_double((mt + height - mb) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt_double((mt + height - mb) / 2) + ")\">" + detail::esc(y_label) + "</text>\n";
    // color scale legend
    for (int s = 0; s <= 20; ++s) {
        double v = lo + (hi - lo) * s / 20.0;
        double y = height - mb - (height - mt - mb) * s / 20.0;
        out += "<rect x=\"" + fmt_double(width - mr + 20) + "\" y=\"" +
               fmt_double(y - (height - mt - mb) / 20.0) + "\" width=\"18\" height=\"" +
               fmt_double((height - mt - mb) / 20.0) + "\" fill=\"" + color(v) + "\"/>\n";
    }
    out += "<text x=\"" + fmt_double(width - mr + 44) + "\" y=\"" + fmt_double(mt + 10) + "\">" +
           fmt_double(hi) + "</text>\n";
    out += "<text x=\"" + fmt_double(width - mr + 44) + "\" y=\"" + fmt_double(height - mb) + "\">" +
           fmt_double(lo) + "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace svg
}  // namespace ccc
