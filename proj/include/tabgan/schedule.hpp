#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "tabgan/errors.hpp"

namespace tabgan {

enum class ScheduleMode { all_at_end, uniform, geometric };

inline std::string to_string(ScheduleMode m) {
    switch (m) {
        case ScheduleMode::all_at_end: return "all_at_end";
        case ScheduleMode::uniform: return "uniform";
        case ScheduleMode::geometric: return "geometric";
    }
    return "all_at_end";
}

inline ScheduleMode schedule_mode_from_string(std::string_view s) {
    if (s == "all_at_end") return ScheduleMode::all_at_end;
    if (s == "uniform") return ScheduleMode::uniform;
    if (s == "geometric") return ScheduleMode::geometric;
    throw ParseError("unknown schedule mode: " + std::string(s));
}

// Per-epoch synthetic-row quotas. first_item and total are percentages of the
// real row count; quotas always sum to the requested synthetic count exactly.
struct GenerationSchedule {
    ScheduleMode mode = ScheduleMode::all_at_end;
    std::size_t epochs = 0;
    double first_item = 0.0;
    double total = 100.0;
    double ratio = 1.0;
    std::vector<std::size_t> quotas;

    std::size_t target() const {
        return std::accumulate(quotas.begin(), quotas.end(), std::size_t{0});
    }
};

namespace detail {

// a * (r^E - 1) / (r - 1), the sum of the E-term geometric series.
inline double geometric_sum(double a, std::size_t epochs, double r) {
    if (r == 1.0) return a * static_cast<double>(epochs);
    return a * (std::pow(r, static_cast<double>(epochs)) - 1.0) / (r - 1.0);
}

}  // namespace detail

/// Solves a*(r^E - 1)/(r - 1) = S for the common ratio r >= 1 by bisection
/// on the monotone sum. Returns exactly 1 when a*E = S; rejects a*E > S
/// (the schedule only grows).
inline double solve_common_ratio(double first_item, std::size_t epochs, double total) {
    if (first_item <= 0.0 || total <= 0.0 || epochs < 1) {
        throw ScheduleError("solve_common_ratio: need a > 0, S > 0, E >= 1");
    }
    const double uniform_sum = first_item * static_cast<double>(epochs);
    if (uniform_sum > total) {
        throw ScheduleError("solve_common_ratio: a*E = " + std::to_string(uniform_sum) +
                            " exceeds S = " + std::to_string(total) +
                            "; a shrinking progression is not supported");
    }
    if (epochs == 1) {
        if (first_item != total) {
            throw ScheduleError("solve_common_ratio: with E = 1 the first item must equal S");
        }
        return 1.0;
    }
    if (uniform_sum == total) return 1.0;

    double lo = 1.0;
    double hi = 1.0 + 1.0 / static_cast<double>(epochs);
    while (detail::geometric_sum(first_item, epochs, hi) < total) {
        lo = hi;
        hi = 1.0 + (hi - 1.0) * 2.0;
    }
    for (int iter = 0; iter < 500; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double sum = detail::geometric_sum(first_item, epochs, mid);
        if (std::abs(sum - total) <= 1e-9) return mid;
        if (sum < total) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Builds the per-epoch quota list for n_target synthetic rows.
///   geometric:   p_e = a*r^(e-1), n_e = floor(n_target*p_e/S); leftover rows
///                go to the final epochs, one each, largest index first.
///   uniform:     equal shares with the same leftover rule.
///   all_at_end:  everything after the last epoch.
/// ratio_override forces r instead of solving for it; quotas are then scaled
/// by the overridden progression's own sum so they still total n_target.
inline GenerationSchedule build_schedule(ScheduleMode mode, std::size_t n_target,
                                         std::size_t epochs, double first_item = 0.0,
                                         double total = 100.0, double ratio_override = 0.0) {
    if (epochs < 1) throw ScheduleError("build_schedule: need at least one epoch");
    GenerationSchedule s;
    s.mode = mode;
    s.epochs = epochs;
    s.first_item = first_item;
    s.total = total;
    s.quotas.assign(epochs, 0);

    switch (mode) {
        case ScheduleMode::all_at_end:
            s.quotas[epochs - 1] = n_target;
            return s;
        case ScheduleMode::uniform: {
            const std::size_t base = n_target / epochs;
            std::size_t leftover = n_target - base * epochs;
            for (auto& q : s.quotas) q = base;
            for (std::size_t i = epochs; i-- > 0 && leftover > 0;) {
                ++s.quotas[i];
                --leftover;
            }
            return s;
        }
        case ScheduleMode::geometric:
            break;
    }

    double denom = total;
    if (ratio_override > 0.0) {
        s.ratio = ratio_override;
        denom = detail::geometric_sum(first_item, epochs, s.ratio);
    } else {
        s.ratio = solve_common_ratio(first_item, epochs, total);
    }
    const double scale = static_cast<double>(n_target) / denom;
    std::size_t assigned = 0;
    double p = first_item;
    for (std::size_t e = 0; e < epochs; ++e) {
        const std::size_t q = static_cast<std::size_t>(std::floor(p * scale));
        s.quotas[e] = q;
        assigned += q;
        p *= s.ratio;
    }
    if (assigned > n_target) {
        throw ScheduleError("build_schedule: internal quota overflow");
    }
    std::size_t leftover = n_target - assigned;
    while (leftover > 0) {
        for (std::size_t i = epochs; i-- > 0 && leftover > 0;) {
            ++s.quotas[i];
            --leftover;
        }
    }
    return s;
}

}  // namespace tabgan
