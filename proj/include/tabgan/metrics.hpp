#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabgan/errors.hpp"
#include "tabgan/matrix.hpp"
#include "tabgan/table.hpp"

namespace tabgan {

/// 1 - sup_x |F_real(x) - F_synth(x)| over the empirical CDFs, evaluated at
/// every point of the pooled sample.
inline double ks_complement(std::span<const double> real, std::span<const double> synth) {
    if (real.empty() || synth.empty()) throw ArgumentError("ks_complement: empty input");
    std::vector<double> r(real.begin(), real.end());
    std::vector<double> s(synth.begin(), synth.end());
    std::sort(r.begin(), r.end());
    std::sort(s.begin(), s.end());
    const double nr = static_cast<double>(r.size());
    const double ns = static_cast<double>(s.size());

    double max_gap = 0.0;
    std::size_t ir = 0, is = 0;
    while (ir < r.size() || is < s.size()) {
        const double x = (ir < r.size() && (is >= s.size() || r[ir] <= s[is])) ? r[ir] : s[is];
        while (ir < r.size() && r[ir] <= x) ++ir;
        while (is < s.size() && s[is] <= x) ++is;
        max_gap = std::max(max_gap,
                           std::abs(static_cast<double>(ir) / nr - static_cast<double>(is) / ns));
    }
    return 1.0 - max_gap;
}

/// 1 - total variation distance between the category frequency tables,
/// taken over the union of observed categories.
inline double tv_complement(std::span<const std::int32_t> real,
                            std::span<const std::int32_t> synth) {
    if (real.empty() || synth.empty()) throw ArgumentError("tv_complement: empty input");
    std::map<std::int32_t, double> freq_r, freq_s;
    for (auto c : real) freq_r[c] += 1.0;
    for (auto c : synth) freq_s[c] += 1.0;
    const double nr = static_cast<double>(real.size());
    const double ns = static_cast<double>(synth.size());

    double l1 = 0.0;
    auto ir = freq_r.begin();
    auto is = freq_s.begin();
    while (ir != freq_r.end() || is != freq_s.end()) {
        if (is == freq_s.end() || (ir != freq_r.end() && ir->first < is->first)) {
            l1 += ir->second / nr;
            ++ir;
        } else if (ir == freq_r.end() || is->first < ir->first) {
            l1 += is->second / ns;
            ++is;
        } else {
            l1 += std::abs(ir->second / nr - is->second / ns);
            ++ir;
            ++is;
        }
    }
    return 1.0 - 0.5 * l1;
}

namespace detail {

inline double pearson(std::span<const double> x, std::span<const double> y,
                      const std::string& label) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ArgumentError("pearson: need two equal-length samples of size >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw EvalError("correlation: zero variance in " + label);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

/// 1 - |rho_real - rho_synth| / 2 with Pearson correlation.
inline double correlation_similarity(std::span<const double> real_x,
                                     std::span<const double> real_y,
                                     std::span<const double> synth_x,
                                     std::span<const double> synth_y,
                                     const std::string& label = "input") {
    const double rho_r = detail::pearson(real_x, real_y, "real " + label);
    const double rho_s = detail::pearson(synth_x, synth_y, "synthetic " + label);
    return 1.0 - std::abs(rho_r - rho_s) / 2.0;
}

/// 1 - half the L1 distance between the real and synthetic joint (2-column)
/// relative frequency tables, over the union of observed joint categories.
inline double contingency_similarity(std::span<const std::int32_t> real_x,
                                     std::span<const std::int32_t> real_y,
                                     std::span<const std::int32_t> synth_x,
                                     std::span<const std::int32_t> synth_y) {
    if (real_x.empty() || synth_x.empty()) throw ArgumentError("contingency_similarity: empty input");
    if (real_x.size() != real_y.size() || synth_x.size() != synth_y.size()) {
        throw ArgumentError("contingency_similarity: column length mismatch within a dataset");
    }
    std::map<std::pair<std::int32_t, std::int32_t>, double> freq_r, freq_s;
    for (std::size_t i = 0; i < real_x.size(); ++i) freq_r[{real_x[i], real_y[i]}] += 1.0;
    for (std::size_t i = 0; i < synth_x.size(); ++i) freq_s[{synth_x[i], synth_y[i]}] += 1.0;
    const double nr = static_cast<double>(real_x.size());
    const double ns = static_cast<double>(synth_x.size());

    double l1 = 0.0;
    auto ir = freq_r.begin();
    auto is = freq_s.begin();
    while (ir != freq_r.end() || is != freq_s.end()) {
        if (is == freq_s.end() || (ir != freq_r.end() && ir->first < is->first)) {
            l1 += ir->second / nr;
            ++ir;
        } else if (ir == freq_r.end() || is->first < ir->first) {
            l1 += is->second / ns;
            ++is;
        } else {
            l1 += std::abs(ir->second / nr - is->second / ns);
            ++ir;
            ++is;
        }
    }
    return 1.0 - 0.5 * l1;
}

// A: continuous, B: categorical with at most small_threshold categories,
// C: categorical with more.
enum class ColumnType { A, B, C };

inline char to_char(ColumnType t) {
    switch (t) {
        case ColumnType::A: return 'A';
        case ColumnType::B: return 'B';
        case ColumnType::C: return 'C';
    }
    return '?';
}

inline ColumnType classify_column_type(const ColumnSpec& spec, std::size_t small_threshold = 15) {
    if (small_threshold < 2) throw ArgumentError("classify_column_type: threshold must be >= 2");
    if (spec.kind == ColumnKind::continuous) return ColumnType::A;
    return spec.categories.size() <= small_threshold ? ColumnType::B : ColumnType::C;
}

struct FidelityReport {
    std::vector<std::string> column_names;
    std::vector<ColumnType> column_types;
    std::vector<double> shape_scores;   // per column
    Matrix pair_scores;                 // full symmetric matrix, diagonal = 1
    double avg_shape = 0.0;
    double avg_pair = 0.0;
    double overall = 0.0;               // mean of the two averages
    std::map<std::string, double> type_pair_averages;  // "AA", "AB", ... present pairs only

    nlohmann::json to_json() const {
        nlohmann::json cols = nlohmann::json::array();
        for (std::size_t i = 0; i < column_names.size(); ++i) {
            cols.push_back({{"name", column_names[i]},
                            {"type", std::string(1, to_char(column_types[i]))},
                            {"shape_score", shape_scores[i]}});
        }
        nlohmann::json pairs = nlohmann::json::array();
        for (std::size_t i = 0; i < pair_scores.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < pair_scores.cols; ++j) row.push_back(pair_scores.at(i, j));
            pairs.push_back(std::move(row));
        }
        return {{"columns", cols},
                {"pairs", pairs},
                {"averages",
                 {{"shape", avg_shape}, {"pair_trend", avg_pair}, {"overall", overall}}},
                {"type_pairs", type_pair_averages}};
    }

    // Pair matrix as CSV, with a header row/column of names.
    std::string pair_matrix_csv() const {
        std::ostringstream os;
        os << "column";
        for (const auto& n : column_names) os << ',' << n;
        os << '\n';
        for (std::size_t i = 0; i < pair_scores.rows; ++i) {
            os << column_names[i];
            for (std::size_t j = 0; j < pair_scores.cols; ++j) os << ',' << pair_scores.at(i, j);
            os << '\n';
        }
        return os.str();
    }
};

namespace detail {

// Equal-width discretization over the REAL column's range; out-of-range
// values (synthetic overflow) clamp to the edge bins.
inline std::vector<std::int32_t> discretize(std::span<const double> values, double lo, double hi,
                                            std::size_t bins) {
    std::vector<std::int32_t> out;
    out.reserve(values.size());
    const double span = hi - lo;
    for (double v : values) {
        std::int32_t b = 0;
        if (span > 0.0) {
            b = static_cast<std::int32_t>(std::floor((v - lo) / span * static_cast<double>(bins)));
            b = std::clamp(b, std::int32_t{0}, static_cast<std::int32_t>(bins) - 1);
        }
        out.push_back(b);
    }
    return out;
}

}  // namespace detail

// Shape score per column (KSComplement for continuous, TVComplement for
// categorical) and pair-trend score per unordered pair (CorrelationSimilarity
// for continuous pairs, ContingencySimilarity otherwise; the continuous
// member of a mixed pair is discretized into mixed_bins equal-width bins over
// the real column's range).
inline FidelityReport evaluate_all(const DataTable& real, const DataTable& synth,
                                   std::size_t small_threshold = 15, std::size_t mixed_bins = 10) {
    if (real.schema() != synth.schema()) {
        throw EvalError("evaluate_all: real and synthetic schemas differ");
    }
    if (real.row_count() == 0 || synth.row_count() == 0) {
        throw EvalError("evaluate_all: empty table");
    }
    const auto& schema = real.schema();
    const std::size_t n = schema.size();

    FidelityReport rep;
    rep.pair_scores = Matrix(n, n, 1.0);
    for (std::size_t c = 0; c < n; ++c) {
        rep.column_names.push_back(schema.columns[c].name);
        rep.column_types.push_back(classify_column_type(schema.columns[c], small_threshold));
        if (real.is_continuous(c)) {
            rep.shape_scores.push_back(ks_complement(real.nums(c), synth.nums(c)));
        } else {
            rep.shape_scores.push_back(tv_complement(real.cats(c), synth.cats(c)));
        }
    }

    // Discretizations are shared across pairs; build them lazily per column.
    std::vector<std::vector<std::int32_t>> real_bins(n), synth_bins(n);
    auto binned = [&](std::size_t c) -> void {
        if (!real_bins[c].empty() || !real.is_continuous(c)) return;
        const auto& vals = real.nums(c);
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        real_bins[c] = detail::discretize(real.nums(c), *lo, *hi, mixed_bins);
        synth_bins[c] = detail::discretize(synth.nums(c), *lo, *hi, mixed_bins);
    };

    std::map<std::string, std::pair<double, std::size_t>> type_acc;
    double pair_sum = 0.0;
    std::size_t pair_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool ci = real.is_continuous(i);
            const bool cj = real.is_continuous(j);
            double score;
            if (ci && cj) {
                score = correlation_similarity(real.nums(i), real.nums(j), synth.nums(i),
                                               synth.nums(j),
                                               "pair (" + schema.columns[i].name + ", " +
                                                   schema.columns[j].name + ")");
            } else if (!ci && !cj) {
                score = contingency_similarity(real.cats(i), real.cats(j), synth.cats(i),
                                               synth.cats(j));
            } else {
                binned(i);
                binned(j);
                const std::span<const std::int32_t> rx = ci ? std::span<const std::int32_t>(real_bins[i])
                                                            : std::span<const std::int32_t>(real.cats(i));
                const std::span<const std::int32_t> ry = cj ? std::span<const std::int32_t>(real_bins[j])
                                                            : std::span<const std::int32_t>(real.cats(j));
                const std::span<const std::int32_t> sx = ci ? std::span<const std::int32_t>(synth_bins[i])
                                                            : std::span<const std::int32_t>(synth.cats(i));
                const std::span<const std::int32_t> sy = cj ? std::span<const std::int32_t>(synth_bins[j])
                                                            : std::span<const std::int32_t>(synth.cats(j));
                score = contingency_similarity(rx, ry, sx, sy);
            }
            rep.pair_scores.at(i, j) = score;
            rep.pair_scores.at(j, i) = score;
            pair_sum += score;
            ++pair_count;

            const char a = to_char(rep.column_types[i]);
            const char b = to_char(rep.column_types[j]);
            std::string key{std::min(a, b), std::max(a, b)};
            auto& acc = type_acc[key];
            acc.first += score;
            acc.second += 1;
        }
    }

    double shape_sum = 0.0;
    for (double s : rep.shape_scores) shape_sum += s;
    rep.avg_shape = shape_sum / static_cast<double>(n);
    rep.avg_pair = pair_count ? pair_sum / static_cast<double>(pair_count) : 0.0;
    rep.overall = 0.5 * (rep.avg_shape + rep.avg_pair);
    for (const auto& [key, acc] : type_acc) {
        rep.type_pair_averages[key] = acc.first / static_cast<double>(acc.second);
    }
    return rep;
}

}  // namespace tabgan
