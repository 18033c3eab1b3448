// Copyright 2026 The randmpf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "randmpf/error.hpp"
#include "randmpf/text_format.hpp"

namespace randmpf {

struct CsvRow {
    double tau = 0.0;
    std::string method;
    double value = 0.0;
    std::string kind;  // "bound" or "distance"
};

inline void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << "tau,method,value,kind\n";
    for (const CsvRow& r : rows) {
        out << format_double(r.tau) << ',' << r.method << ',' << format_double(r.value) << ',' << r.kind << '\n';
    }
}

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace detail

/// Log-log line plot, one polyline per series. Nonpositive points are skipped.
inline void write_svg(std::ostream& out, const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    const double W = 720, Hgt = 480, ml = 80, mr = 150, mt = 40, mb = 60;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const PlotSeries& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] > 0 && s.y[i] > 0 && std::isfinite(s.y[i])) {
                xlo = std::min(xlo, std::log10(s.x[i]));
                xhi = std::max(xhi, std::log10(s.x[i]));
                ylo = std::min(ylo, std::log10(s.y[i]));
                yhi = std::max(yhi, std::log10(s.y[i]));
            }
        }
    }
    if (!(xhi >= xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    xlo = std::floor(xlo), xhi = std::max(std::ceil(xhi), xlo + 1);
    ylo = std::floor(ylo), yhi = std::max(std::ceil(yhi), ylo + 1);
    const double pw = W - ml - mr, ph = Hgt - mt - mb;
    auto px = [&](double lx) { return ml + (lx - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double ly) { return mt + (yhi - ly) / (yhi - ylo) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::svg_escape(title)
        << "</text>\n";
    const int ystep = std::max(1, static_cast<int>(std::ceil((yhi - ylo) / 10)));
    for (int e = static_cast<int>(xlo); e <= static_cast<int>(xhi); ++e) {
        double x = px(e);
        out << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << mt + ph
            << "\" stroke=\"#ddd\"/>\n<text x=\"" << x << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    for (int e = static_cast<int>(ylo); e <= static_cast<int>(yhi); e += ystep) {
        double y = py(e);
        out << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
            << "\" stroke=\"#ddd\"/>\n<text x=\"" << ml - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e
            << "</text>\n";
    }
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << Hgt - 15 << "\" text-anchor=\"middle\">"
        << detail::svg_escape(xlabel) << "</text>\n";
    out << "<text transform=\"translate(20," << mt + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << detail::svg_escape(ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* col = colors[k % (sizeof colors / sizeof *colors)];
        out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            double x = series[k].x[i], y = series[k].y[i];
            if (x > 0 && y > 0 && std::isfinite(y)) {
                out << detail::fmt("%.2f", px(std::log10(x))) << ',' << detail::fmt("%.2f", py(std::log10(y))) << ' ';
            }
        }
        out << "\"/>\n";
        double ly = mt + 16 + 18.0 * static_cast<double>(k);
        out << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 36 << "\" y2=\"" << ly
            << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n<text x=\"" << ml + pw + 42 << "\" y=\"" << ly + 4
            << "\">" << detail::svg_escape(series[k].name) << "</text>\n";
    }
    out << "</svg>\n";
}

/// Groups CSV rows into one series per (method, kind).
inline std::vector<PlotSeries> rows_to_series(const std::vector<CsvRow>& rows) {
    std::vector<PlotSeries> out;
    std::map<std::string, std::size_t> index;
    for (const CsvRow& r : rows) {
        std::string key = r.method + " " + r.kind;
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            out.push_back({key, {}, {}});
        }
        out[it->second].x.push_back(r.tau);
        out[it->second].y.push_back(r.value);
    }
    return out;
}

inline void save_svg(const std::string& path, const std::vector<CsvRow>& rows, const std::string& title,
                     const std::string& ylabel) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_svg(out, rows_to_series(rows), title, "tau = Lambda t", ylabel);
}

}  // namespace randmpf
