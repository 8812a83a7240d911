#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tabgan/csv.hpp"
#include "tabgan/errors.hpp"
#include "tabgan/metrics.hpp"
#include "tabgan/table.hpp"

namespace tabgan {
namespace charts {

namespace detail {

using tabgan::detail::format_double;

inline std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out.empty() ? "column" : out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

struct FrequencyRow {
    std::string label;
    double real = 0.0;
    double synth = 0.0;
};

// Relative frequencies for one column: category shares, or 20-equal-width-bin
// shares over the real column's range (synthetic overflow clamps to the edge
// bins, matching how the data would be drawn on a shared axis).
inline std::vector<FrequencyRow> column_frequencies(const DataTable& real, const DataTable& synth,
                                                    std::size_t col, std::size_t bins) {
    std::vector<FrequencyRow> rows;
    const double nr = static_cast<double>(real.row_count());
    const double ns = static_cast<double>(synth.row_count());
    if (real.is_continuous(col)) {
        const auto& rv = real.nums(col);
        const auto [lo_it, hi_it] = std::minmax_element(rv.begin(), rv.end());
        const double lo = *lo_it, hi = *hi_it;
        const double span = hi - lo;
        rows.resize(bins);
        for (std::size_t b = 0; b < bins; ++b) {
            const double w = span / static_cast<double>(bins);
            rows[b].label = "[" + format_double(lo + w * static_cast<double>(b)) + ", " +
                            format_double(b + 1 == bins ? hi : lo + w * static_cast<double>(b + 1)) +
                            (b + 1 == bins ? "]" : ")");
        }
        auto bin_of = [&](double v) {
            if (span <= 0.0) return std::size_t{0};
            const double t = (v - lo) / span * static_cast<double>(bins);
            return static_cast<std::size_t>(
                std::clamp(t, 0.0, static_cast<double>(bins) - 1.0));
        };
        for (double v : rv) rows[bin_of(v)].real += 1.0 / nr;
        for (double v : synth.nums(col)) rows[bin_of(v)].synth += 1.0 / ns;
    } else {
        const auto& cats = real.schema().columns[col].categories;
        rows.resize(cats.size());
        for (std::size_t i = 0; i < cats.size(); ++i) rows[i].label = cats[i];
        for (auto c : real.cats(col)) rows[static_cast<std::size_t>(c)].real += 1.0 / nr;
        for (auto c : synth.cats(col)) rows[static_cast<std::size_t>(c)].synth += 1.0 / ns;
    }
    return rows;
}

}  // namespace detail

inline void write_frequencies_csv(const std::vector<detail::FrequencyRow>& rows,
                                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "label,real,synthetic\n";
    for (const auto& r : rows) {
        out << tabgan::detail::csv_escape(r.label) << ',' << detail::format_double(r.real) << ','
            << detail::format_double(r.synth) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

// Side-by-side bar overlay of real vs synthetic shares for one column.
inline void write_overlay_svg(const std::string& title,
                              const std::vector<detail::FrequencyRow>& rows,
                              const std::filesystem::path& path) {
    const double bar = 9.0, gap = 8.0, plot_h = 220.0;
    const double left = 50.0, top = 40.0, bottom = 80.0;
    const double group = 2.0 * bar + gap;
    const double width = left + group * static_cast<double>(rows.size()) + 160.0;
    const double height = top + plot_h + bottom;
    double peak = 0.0;
    for (const auto& r : rows) peak = std::max({peak, r.real, r.synth});
    if (peak <= 0.0) peak = 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << detail::format_double(width) << "\" height=\"" << detail::format_double(height)
        << "\">\n";
    out << "<text x=\"" << detail::format_double(left) << "\" y=\"20\" font-family=\"sans-serif\""
        << " font-size=\"14\">" << detail::xml_escape(title) << "</text>\n";
    // legend
    out << "<rect x=\"" << detail::format_double(width - 140.0)
        << "\" y=\"12\" width=\"10\" height=\"10\" fill=\"#4878a8\"/>"
        << "<text x=\"" << detail::format_double(width - 126.0)
        << "\" y=\"21\" font-family=\"sans-serif\" font-size=\"11\">real</text>\n";
    out << "<rect x=\"" << detail::format_double(width - 80.0)
        << "\" y=\"12\" width=\"10\" height=\"10\" fill=\"#e0883a\"/>"
        << "<text x=\"" << detail::format_double(width - 66.0)
        << "\" y=\"21\" font-family=\"sans-serif\" font-size=\"11\">synthetic</text>\n";
    // axis line
    out << "<line x1=\"" << detail::format_double(left - 4.0) << "\" y1=\""
        << detail::format_double(top + plot_h) << "\" x2=\"" << detail::format_double(width - 20.0)
        << "\" y2=\"" << detail::format_double(top + plot_h) << "\" stroke=\"#444\"/>\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double x = left + group * static_cast<double>(i);
        const double hr = plot_h * rows[i].real / peak;
        const double hs = plot_h * rows[i].synth / peak;
        out << "<rect x=\"" << detail::format_double(x) << "\" y=\""
            << detail::format_double(top + plot_h - hr) << "\" width=\""
            << detail::format_double(bar) << "\" height=\"" << detail::format_double(hr)
            << "\" fill=\"#4878a8\"/>\n";
        out << "<rect x=\"" << detail::format_double(x + bar) << "\" y=\""
            << detail::format_double(top + plot_h - hs) << "\" width=\""
            << detail::format_double(bar) << "\" height=\"" << detail::format_double(hs)
            << "\" fill=\"#e0883a\"/>\n";
        out << "<text x=\"" << detail::format_double(x + bar) << "\" y=\""
            << detail::format_double(top + plot_h + 10.0)
            << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\""
            << " transform=\"rotate(-55 " << detail::format_double(x + bar) << " "
            << detail::format_double(top + plot_h + 10.0) << ")\">"
            << detail::xml_escape(rows[i].label) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + path.string());
}

// Pair-trend matrix as a colored grid, low scores dark, perfect scores light.
inline void write_heatmap_svg(const FidelityReport& report, const std::filesystem::path& path) {
    const std::size_t n = report.column_names.size();
    const double cell = 44.0, left = 110.0, top = 110.0;
    const double width = left + cell * static_cast<double>(n) + 20.0;
    const double height = top + cell * static_cast<double>(n) + 20.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << detail::format_double(width) << "\" height=\"" << detail::format_double(height)
        << "\">\n";
    out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
        << "pair trend scores</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double y = top + cell * static_cast<double>(i);
        out << "<text x=\"" << detail::format_double(left - 6.0) << "\" y=\""
            << detail::format_double(y + cell / 2.0 + 3.0)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
            << detail::xml_escape(report.column_names[i]) << "</text>\n";
        const double x = left + cell * static_cast<double>(i);
        out << "<text x=\"" << detail::format_double(x + cell / 2.0) << "\" y=\""
            << detail::format_double(top - 8.0)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"start\""
            << " transform=\"rotate(-55 " << detail::format_double(x + cell / 2.0) << " "
            << detail::format_double(top - 8.0) << ")\">"
            << detail::xml_escape(report.column_names[i]) << "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double s = std::clamp(report.pair_scores.at(i, j), 0.0, 1.0);
            // 0 -> dark blue, 1 -> near white
            const int r = static_cast<int>(30.0 + 225.0 * s);
            const int g = static_cast<int>(60.0 + 190.0 * s);
            const int b = static_cast<int>(120.0 + 135.0 * s);
            const double x = left + cell * static_cast<double>(j);
            const double y = top + cell * static_cast<double>(i);
            out << "<rect x=\"" << detail::format_double(x) << "\" y=\""
                << detail::format_double(y) << "\" width=\"" << detail::format_double(cell)
                << "\" height=\"" << detail::format_double(cell) << "\" fill=\"rgb(" << r << ','
                << g << ',' << b << ")\" stroke=\"#ffffff\"/>\n";
            char label[8];
            std::snprintf(label, sizeof label, "%.2f", s);
            out << "<text x=\"" << detail::format_double(x + cell / 2.0) << "\" y=\""
                << detail::format_double(y + cell / 2.0 + 3.0)
                << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\""
                << " fill=\"" << (s < 0.5 ? "#ffffff" : "#222222") << "\">" << label
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + path.string());
}

// Emits, into `dir`: <column>_freq.csv and <column>.svg per column, the pair
// matrix CSV, and the heat map SVG. Paths are appended to `written` before
// each write so callers can clean up after a partial failure.
inline void write_all_charts(const DataTable& real, const DataTable& synth,
                             const FidelityReport& report, const std::filesystem::path& dir,
                             std::vector<std::filesystem::path>& written, std::size_t bins = 20) {
    std::filesystem::create_directories(dir);
    for (std::size_t c = 0; c < real.col_count(); ++c) {
        const auto rows = detail::column_frequencies(real, synth, c, bins);
        const std::string base = detail::sanitize(real.schema().columns[c].name);
        const auto csv_path = dir / (base + "_freq.csv");
        written.push_back(csv_path);
        write_frequencies_csv(rows, csv_path);
        const auto svg_path = dir / (base + ".svg");
        written.push_back(svg_path);
        write_overlay_svg(real.schema().columns[c].name, rows, svg_path);
    }
    const auto matrix_path = dir / "pair_matrix.csv";
    written.push_back(matrix_path);
    {
        std::ofstream out(matrix_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + matrix_path.string());
        out << report.pair_matrix_csv();
    }
    const auto heatmap_path = dir / "pair_heatmap.svg";
    written.push_back(heatmap_path);
    write_heatmap_svg(report, heatmap_path);
}

}  // namespace charts
}  // namespace tabgan
