#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "tabgan/csv.hpp"
#include "tabgan/errors.hpp"
#include "tabgan/table.hpp"

namespace tabgan {

namespace detail {

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline std::size_t require_column(const DataTable& t, const std::string& name) {
    const int idx = t.schema().find_ci(name);
    if (idx < 0) throw PrepError("missing required column: " + name);
    return static_cast<std::size_t>(idx);
}

}  // namespace detail

// Replaces missing cells of a continuous column with the median of its
// (group_by) group; groups with no observed values fall back to the global
// median. Non-missing cells are never touched.
inline DataTable impute_group_median(const DataTable& table, const std::string& target,
                                     const std::vector<std::string>& group_by) {
    const int tc = table.schema().find_ci(target);
    if (tc < 0) throw PrepError("impute_group_median: no such column " + target);
    if (table.is_continuous(static_cast<std::size_t>(tc)) == false) {
        throw TypeError("impute_group_median: target column " + target + " is not continuous");
    }
    std::vector<std::size_t> gcols;
    for (const auto& g : group_by) {
        const int gc = table.schema().find_ci(g);
        if (gc < 0) throw PrepError("impute_group_median: no such column " + g);
        if (table.is_continuous(static_cast<std::size_t>(gc))) {
            throw TypeError("impute_group_median: group column " + g + " is not categorical");
        }
        gcols.push_back(static_cast<std::size_t>(gc));
    }

    const std::size_t target_col = static_cast<std::size_t>(tc);
    auto key_of = [&](std::size_t r) {
        std::vector<std::int32_t> key;
        key.reserve(gcols.size());
        for (auto gc : gcols) key.push_back(table.cat(r, gc));
        return key;
    };

    std::map<std::vector<std::int32_t>, std::vector<double>> groups;
    std::vector<double> global;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (table.missing(r, target_col)) continue;
        const double v = table.num(r, target_col);
        groups[key_of(r)].push_back(v);
        global.push_back(v);
    }
    if (global.empty()) {
        throw PrepError("impute_group_median: column " + target + " has no observed values");
    }
    const double global_median = detail::median(global);

    DataTable out = table;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (!table.missing(r, target_col)) continue;
        const auto it = groups.find(key_of(r));
        out.set_num(r, target_col, it == groups.end() ? global_median : detail::median(it->second));
    }
    return out;
}

// Missing cells of a categorical column become fill_value; the value is
// appended to the dictionary if absent.
inline DataTable fill_categorical(const DataTable& table, const std::string& column,
                                  const std::string& fill_value) {
    const int ci = table.schema().find_ci(column);
    if (ci < 0) throw PrepError("fill_categorical: no such column " + column);
    const std::size_t c = static_cast<std::size_t>(ci);
    if (table.is_continuous(c)) {
        throw TypeError("fill_categorical: column " + column + " is not categorical");
    }
    DataTable out = table;
    const std::int32_t idx = out.add_category(c, fill_value);
    for (std::size_t r = 0; r < out.row_count(); ++r) {
        if (out.missing(r, c)) out.set_cat(r, c, idx);
    }
    return out;
}

// Collapses rows sharing (identity_cols, year_col) to their first occurrence
// and appends categorical AOS/AOE columns counting the distinct sports and
// events inside each collapsed group. Rows for the same identity in different
// years stay separate.
inline DataTable dedup_with_participation_counts(const DataTable& table,
                                                 const std::vector<std::string>& identity_cols,
                                                 const std::string& year_col,
                                                 const std::string& sport_col,
                                                 const std::string& event_col) {
    std::vector<std::size_t> key_cols;
    for (const auto& name : identity_cols) key_cols.push_back(detail::require_column(table, name));
    key_cols.push_back(detail::require_column(table, year_col));
    const std::size_t sc = detail::require_column(table, sport_col);
    const std::size_t ec = detail::require_column(table, event_col);

    std::vector<std::size_t> offending;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (auto c : key_cols) {
            if (table.missing(r, c)) {
                offending.push_back(r + 1);
                break;
            }
        }
    }
    if (!offending.empty()) {
        std::string rows;
        for (std::size_t i = 0; i < offending.size() && i < 10; ++i) {
            if (i) rows += ", ";
            rows += std::to_string(offending[i]);
        }
        if (offending.size() > 10) rows += ", ...";
        throw PrepError("dedup: missing identity/year values in rows " + rows);
    }

    auto cell_token = [&](std::size_t r, std::size_t c) {
        if (table.is_continuous(c)) return "n:" + detail::format_double(table.num(r, c));
        return "c:" + std::to_string(table.cat(r, c));
    };

    struct Group {
        std::size_t first_row;
        std::set<std::string> sports;
        std::set<std::string> events;
    };
    std::vector<Group> groups;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        std::string key;
        for (auto c : key_cols) {
            key += cell_token(r, c);
            key.push_back('\x1f');
        }
        auto [it, inserted] = index.emplace(key, groups.size());
        if (inserted) groups.push_back({r, {}, {}});
        Group& g = groups[it->second];
        if (!table.missing(r, sc)) g.sports.insert(cell_token(r, sc));
        if (!table.missing(r, ec)) g.events.insert(cell_token(r, ec));
    }

    DataTable out(table.schema(), 0);
    std::vector<std::int32_t> aos, aoe;
    for (const auto& g : groups) {
        const std::size_t row = out.append_row();
        for (std::size_t c = 0; c < table.col_count(); ++c) {
            out.copy_row_from(table, g.first_row, row, c, c);
        }
    }
    ColumnSpec aos_spec{"AOS", ColumnKind::categorical, {}};
    ColumnSpec aoe_spec{"AOE", ColumnKind::categorical, {}};
    DataTable with_counts = out;
    with_counts.add_column(aos_spec, std::vector<std::int32_t>(groups.size(), -1));
    with_counts.add_column(aoe_spec, std::vector<std::int32_t>(groups.size(), -1));
    const std::size_t aos_col = with_counts.col_count() - 2;
    const std::size_t aoe_col = with_counts.col_count() - 1;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        with_counts.set_cat(i, aos_col,
                            with_counts.add_category(aos_col, std::to_string(groups[i].sports.size())));
        with_counts.set_cat(i, aoe_col,
                            with_counts.add_category(aoe_col, std::to_string(groups[i].events.size())));
    }
    return with_counts;
}

// Re-types columns: wanted continuous columns are parsed from their category
// strings if needed, everything else is rendered to categorical.
inline DataTable coerce_kinds(const DataTable& table, const std::vector<std::string>& continuous) {
    auto wants_continuous = [&](const std::string& name) {
        for (const auto& n : continuous) {
            if (n.size() == name.size() &&
                std::equal(n.begin(), n.end(), name.begin(), [](char a, char b) {
                    return std::tolower(static_cast<unsigned char>(a)) ==
                           std::tolower(static_cast<unsigned char>(b));
                })) {
                return true;
            }
        }
        return false;
    };

    TableSchema schema;
    for (const auto& c : table.schema().columns) {
        ColumnSpec spec;
        spec.name = c.name;
        spec.kind = wants_continuous(c.name) ? ColumnKind::continuous : ColumnKind::categorical;
        schema.columns.push_back(std::move(spec));
    }
    DataTable out(schema, table.row_count());
    for (std::size_t c = 0; c < table.col_count(); ++c) {
        const bool src_cont = table.is_continuous(c);
        const bool dst_cont = out.is_continuous(c);
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            if (table.missing(r, c)) continue;
            if (dst_cont) {
                if (src_cont) {
                    out.set_num(r, c, table.num(r, c));
                } else {
                    double v;
                    const auto& s = table.category_name(c, table.cat(r, c));
                    if (!detail::parse_double(s, v)) {
                        throw PrepError("column " + table.schema().columns[c].name +
                                        ": cannot coerce '" + s + "' to a number");
                    }
                    out.set_num(r, c, v);
                }
            } else {
                if (src_cont) {
                    out.set_cat(r, c, out.add_category(c, detail::format_double(table.num(r, c))));
                } else {
                    out.set_cat(r, c, out.add_category(c, table.category_name(c, table.cat(r, c))));
                }
            }
        }
    }
    return out;
}

namespace detail {

inline DataTable project_columns(const DataTable& table, const std::vector<std::size_t>& cols) {
    TableSchema schema;
    for (auto c : cols) {
        ColumnSpec spec = table.schema().columns[c];
        if (spec.kind == ColumnKind::categorical) spec.categories.clear();
        schema.columns.push_back(std::move(spec));
    }
    DataTable out(schema, table.row_count());
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out.copy_row_from(table, r, r, cols[i], i);
        }
    }
    return out;
}

}  // namespace detail

// Olympic athlete pipeline: median imputation of age/height/weight grouped by
// (sport, sex), the "Thanks" medal fill, and per-(athlete, year) dedup with
// AOS/AOE participation counts. Output columns, in order: age, height,
// weight, sex, year, season, city, sport, medal, AOS, AOE.
inline DataTable prepare_olympic(const DataTable& raw) {
    // A table that already carries AOS/AOE and no event column is this
    // pipeline's own output; all three steps would be no-ops on it.
    if (raw.schema().find_ci("AOS") >= 0 && raw.schema().find_ci("AOE") >= 0 &&
        raw.schema().find_ci("event") < 0) {
        return raw;
    }

    static const std::vector<std::string> kRequired = {"age",  "height", "weight", "sex",  "year",
                                                       "season", "city",   "sport",  "medal"};
    for (const auto& name : kRequired) detail::require_column(raw, name);
    detail::require_column(raw, "event");

    DataTable table = coerce_kinds(raw, {"age", "height", "weight"});

    std::vector<std::string> identity;
    if (table.schema().find_ci("id") >= 0) {
        identity = {"id"};
    } else if (table.schema().find_ci("name") >= 0) {
        identity = {"name", "sex"};
    } else {
        throw PrepError("prepare_olympic: need an 'id' or 'name' column to identify athletes");
    }

    for (const auto& col : {"age", "height", "weight"}) {
        table = impute_group_median(table, col, {"sport", "sex"});
    }
    table = fill_categorical(table, "medal", "Thanks");
    table = dedup_with_participation_counts(table, identity, "year", "sport", "event");

    std::vector<std::size_t> keep;
    for (const auto& name : {"age", "height", "weight", "sex", "year", "season", "city", "sport",
                             "medal", "AOS", "AOE"}) {
        keep.push_back(detail::require_column(table, name));
    }
    return detail::project_columns(table, keep);
}

// Census pipeline: categorical gaps become the literal category "Unknown",
// continuous gaps take the column's global median. All columns are kept.
inline DataTable prepare_census(const DataTable& raw) {
    DataTable table = raw;
    for (std::size_t c = 0; c < table.col_count(); ++c) {
        const auto& name = table.schema().columns[c].name;
        bool any_missing = false;
        for (std::size_t r = 0; r < table.row_count() && !any_missing; ++r) {
            any_missing = table.missing(r, c);
        }
        if (!any_missing) continue;
        if (table.is_continuous(c)) {
            std::vector<double> observed;
            for (std::size_t r = 0; r < table.row_count(); ++r) {
                if (!table.missing(r, c)) observed.push_back(table.num(r, c));
            }
            if (observed.empty()) {
                throw PrepError("prepare_census: column " + name + " has no observed values");
            }
            const double med = detail::median(observed);
            for (std::size_t r = 0; r < table.row_count(); ++r) {
                if (table.missing(r, c)) table.set_num(r, c, med);
            }
        } else {
            table = fill_categorical(table, name, "Unknown");
        }
    }
    return table;
}

}  // namespace tabgan
