#pragma once

// CSV tables and minimal SVG line plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hardyqkd/analysis.hpp"

namespace hardyqkd::io {

/// Shortest round-trip-safe text for a double; NaN prints as "nan".
inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_gamma_csv(std::ostream& os, const analysis::GammaGrid& g) {
    os << "eta,h1,h2,h3,h4,gamma0,gamma1\n";
    for (const auto& p : g.points) {
        os << num(p.eta);
        for (int k = 0; k < 4; ++k) os << ',' << num(p.h[k]);
        os << ',' << num(p.bounds.gamma0) << ',' << num(p.bounds.gamma1) << '\n';
    }
}

inline void write_keyrate_csv(std::ostream& os, const std::vector<analysis::KeyRateReport>& rows) {
    os << "eta,dist,strategy,p00,guess,hab,keyrate\n";
    for (const auto& r : rows)
        os << num(r.eta) << ',' << r.dist_label << ',' << analysis::to_string(r.strategy) << ',' << num(r.p00) << ','
           << num(r.guess) << ',' << num(r.hab) << ',' << num(r.key_rate) << '\n';
}

inline void write_bias_csv(std::ostream& os, const std::vector<analysis::BiasRow>& rows) {
    os << "epsilon,hardy_guess,chsh_guess\n";
    for (const auto& r : rows) os << num(r.epsilon) << ',' << num(r.hardy_guess) << ',' << num(r.chsh_guess) << '\n';
}

struct Series {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

/// One polyline per series; axes, ticks and legend use line and text elements only.
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<Series>& series) {
    constexpr double W = 640, H = 420, L = 70, R = 170, T = 40, B = 60;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << title
       << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
        os << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << H - B << "\" x2=\"" << num(px(xv)) << "\" y2=\"" << H - B + 5
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(std::round(xv * 1000) / 1000)
           << "</text>\n";
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << L << "\" y2=\"" << num(py(yv))
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << L - 8 << "\" y=\"" << num(py(yv) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(std::round(yv * 1000) / 1000)
           << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel << "</text>\n";
    os << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       << "transform=\"rotate(-90 18 " << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i)
            os << (i ? " " : "") << num(px(s.points[i].first)) << ',' << num(py(s.points[i].second));
        os << "\"/>\n";
        const double ly = T + 10 + 20.0 * static_cast<double>(k);
        os << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
           << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 45 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace hardyqkd::io
