#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"

namespace mfbounds {

struct Series {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;  // non-finite entries (NotAttained) are not drawn
};

struct Panel {
    std::vector<Series> series;
    std::string x_label;
    std::string y_label;
    std::string title;
};

inline constexpr int kCanvasWidth = 800;
inline constexpr int kCanvasHeight = 600;
inline constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

namespace detail {

inline std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string escape_xml(const std::string& s) {
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

// Tick positions at 1, 2 or 5 times a power of ten, about five per axis.
inline std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double unit = raw / mag < 1.5 ? mag : raw / mag < 3.5 ? 2.0 * mag : raw / mag < 7.5 ? 5.0 * mag : 10.0 * mag;
    std::vector<double> t;
    for (double v = std::ceil(lo / unit) * unit; v <= hi + 1e-9 * unit; v += unit) t.push_back(std::abs(v) < 1e-12 * unit ? 0.0 : v);
    return t;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline void validate_panel(const Panel& p) {
    if (p.series.empty()) throw ValidationError("series", "at least one series is required");
    for (const auto& s : p.series)
        if (s.xs.size() != s.ys.size()) throw ValidationError("series", "'" + s.label + "' has misaligned arrays");
}

inline void render_panel(std::string& out, const Panel& p, double left, double top, double width, double height) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            if (std::isfinite(s.xs[i]) && std::isfinite(s.ys[i])) {
                xmin = std::min(xmin, s.xs[i]);
                xmax = std::max(xmax, s.xs[i]);
                ymin = std::min(ymin, s.ys[i]);
                ymax = std::max(ymax, s.ys[i]);
            }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (xmax - xmin <= 0.0) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin <= 0.0) ymin -= 0.5, ymax += 0.5;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double pl = left + 60.0, pr = left + width - 15.0, pt = top + 40.0, pb = top + height - 50.0;
    auto sx = [&](double x) { return pl + (x - xmin) / (xmax - xmin) * (pr - pl); };
    auto sy = [&](double y) { return pb - (y - ymin) / (ymax - ymin) * (pb - pt); };

    out += "<g>\n";
    out += "<text x=\"" + fixed((pl + pr) / 2) + "\" y=\"" + fixed(top + 22.0) +
           "\" text-anchor=\"middle\" font-size=\"14\">" + escape_xml(p.title) + "</text>\n";
    out += "<rect x=\"" + fixed(pl) + "\" y=\"" + fixed(pt) + "\" width=\"" + fixed(pr - pl) + "\" height=\"" +
           fixed(pb - pt) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    for (double t : ticks(xmin, xmax)) {
        out += "<line x1=\"" + fixed(sx(t)) + "\" y1=\"" + fixed(pb) + "\" x2=\"" + fixed(sx(t)) + "\" y2=\"" +
               fixed(pb + 5.0) + "\" stroke=\"#000000\"/>\n";
        out += "<text x=\"" + fixed(sx(t)) + "\" y=\"" + fixed(pb + 18.0) + "\" text-anchor=\"middle\" font-size=\"11\">" +
               tick_label(t) + "</text>\n";
    }
    for (double t : ticks(ymin, ymax)) {
        out += "<line x1=\"" + fixed(pl - 5.0) + "\" y1=\"" + fixed(sy(t)) + "\" x2=\"" + fixed(pl) + "\" y2=\"" +
               fixed(sy(t)) + "\" stroke=\"#000000\"/>\n";
        out += "<text x=\"" + fixed(pl - 8.0) + "\" y=\"" + fixed(sy(t) + 4.0) + "\" text-anchor=\"end\" font-size=\"11\">" +
               tick_label(t) + "</text>\n";
    }
    out += "<text x=\"" + fixed((pl + pr) / 2) + "\" y=\"" + fixed(pb + 38.0) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape_xml(p.x_label) + "</text>\n";
    out += "<text x=\"" + fixed(left + 16.0) + "\" y=\"" + fixed((pt + pb) / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " +
           fixed(left + 16.0) + " " + fixed((pt + pb) / 2) + ")\">" + escape_xml(p.y_label) + "</text>\n";

    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = p.series[k];
        const std::string colour = kPalette[k % kPalette.size()];
        // Consecutive drawable points form one polyline; gaps split it.
        std::vector<std::vector<std::pair<double, double>>> runs(1);
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (std::isfinite(s.xs[i]) && std::isfinite(s.ys[i])) runs.back().emplace_back(sx(s.xs[i]), sy(s.ys[i]));
            else if (!runs.back().empty()) runs.emplace_back();
        }
        for (const auto& run : runs) {
            if (run.size() == 1) {
                out += "<circle cx=\"" + fixed(run[0].first) + "\" cy=\"" + fixed(run[0].second) + "\" r=\"3\" fill=\"" +
                       colour + "\"/>\n";
            } else if (run.size() > 1) {
                out += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < run.size(); ++i)
                    out += (i ? " " : "") + fixed(run[i].first) + "," + fixed(run[i].second);
                out += "\"/>\n";
            }
        }
        const double ly = pt + 16.0 + 16.0 * static_cast<double>(k);
        out += "<line x1=\"" + fixed(pl + 10.0) + "\" y1=\"" + fixed(ly - 4.0) + "\" x2=\"" + fixed(pl + 30.0) + "\" y2=\"" +
               fixed(ly - 4.0) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fixed(pl + 35.0) + "\" y=\"" + fixed(ly) + "\" font-size=\"11\">" + escape_xml(s.label) +
               "</text>\n";
    }
    out += "</g>\n";
}

}  // namespace detail

// Panels are laid out side by side on a fixed 800x600 canvas; colours follow
// the palette in series order.
inline std::string render_svg(const std::vector<Panel>& panels) {
    if (panels.empty()) throw ValidationError("panels", "at least one panel is required");
    for (const auto& p : panels) detail::validate_panel(p);
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kCanvasWidth) + "\" height=\"" +
                      std::to_string(kCanvasHeight) + "\" viewBox=\"0 0 " + std::to_string(kCanvasWidth) + " " +
                      std::to_string(kCanvasHeight) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    const double w = static_cast<double>(kCanvasWidth) / static_cast<double>(panels.size());
    for (std::size_t i = 0; i < panels.size(); ++i)
        detail::render_panel(out, panels[i], w * static_cast<double>(i), 0.0, w, kCanvasHeight);
    out += "</svg>\n";
    return out;
}

inline void render_plot(const std::vector<Series>& series, const std::string& x_label, const std::string& y_label,
                        const std::filesystem::path& out, const std::string& title = "") {
    io::atomic_write(out, render_svg({Panel{series, x_label, y_label, title}}));
}

}  // namespace mfbounds
