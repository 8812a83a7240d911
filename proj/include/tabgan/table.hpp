#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tabgan/errors.hpp"

namespace tabgan {

enum class ColumnKind { continuous, categorical };

inline std::string to_string(ColumnKind k) {
    return k == ColumnKind::continuous ? "continuous" : "categorical";
}

inline ColumnKind column_kind_from_string(std::string_view s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "categorical") return ColumnKind::categorical;
    throw ParseError("unknown column kind: " + std::string(s));
}

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
    std::vector<std::string> categories;  // categorical only, first-appearance order

    bool operator==(const ColumnSpec&) const = default;
};

struct TableSchema {
    std::vector<ColumnSpec> columns;

    std::size_t size() const { return columns.size(); }

    int find(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i].name == name) return static_cast<int>(i);
        }
        return -1;
    }

    // Case-insensitive lookup, for user-facing column matching.
    int find_ci(std::string_view name) const {
        auto lower = [](std::string_view s) {
            std::string out(s);
            std::transform(out.begin(), out.end(), out.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            return out;
        };
        const std::string want = lower(name);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (lower(columns[i].name) == want) return static_cast<int>(i);
        }
        return -1;
    }

    void validate() const {
        std::unordered_map<std::string, int> seen;
        for (const auto& c : columns) {
            if (c.name.empty()) throw ParseError("schema: empty column name");
            if (++seen[c.name] > 1) throw ParseError("schema: duplicate column name " + c.name);
        }
    }

    bool operator==(const TableSchema&) const = default;
};

inline nlohmann::json schema_to_json(const TableSchema& schema) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : schema.columns) {
        out.push_back({{"name", c.name},
                       {"kind", to_string(c.kind)},
                       {"categories", c.categories}});
    }
    return out;
}

inline TableSchema schema_from_json(const nlohmann::json& j) {
    TableSchema schema;
    if (!j.is_array()) throw ParseError("schema JSON: expected an array of columns");
    for (const auto& item : j) {
        ColumnSpec spec;
        spec.name = item.at("name").get<std::string>();
        spec.kind = column_kind_from_string(item.at("kind").get<std::string>());
        if (item.contains("categories")) {
            spec.categories = item.at("categories").get<std::vector<std::string>>();
        }
        schema.columns.push_back(std::move(spec));
    }
    schema.validate();
    return schema;
}

// Mixed continuous/categorical table. Continuous cells are float64 with NaN
// as the missing marker; categorical cells are dictionary indices with -1 as
// the missing marker.
class DataTable {
public:
    DataTable() = default;

    explicit DataTable(TableSchema schema, std::size_t rows = 0)
        : schema_(std::move(schema)), n_rows_(rows) {
        schema_.validate();
        cols_.resize(schema_.size());
        dict_.resize(schema_.size());
        for (std::size_t c = 0; c < schema_.size(); ++c) {
            if (is_continuous(c)) {
                cols_[c].nums.assign(rows, missing_num());
            } else {
                cols_[c].cats.assign(rows, -1);
                rebuild_dict(c);
            }
        }
    }

    static constexpr double missing_num() { return std::numeric_limits<double>::quiet_NaN(); }

    const TableSchema& schema() const { return schema_; }
    std::size_t row_count() const { return n_rows_; }
    std::size_t col_count() const { return schema_.size(); }

    bool is_continuous(std::size_t c) const {
        return schema_.columns[c].kind == ColumnKind::continuous;
    }

    bool missing(std::size_t r, std::size_t c) const {
        return is_continuous(c) ? std::isnan(cols_[c].nums[r]) : cols_[c].cats[r] < 0;
    }

    double num(std::size_t r, std::size_t c) const { return cols_[c].nums[r]; }
    std::int32_t cat(std::size_t r, std::size_t c) const { return cols_[c].cats[r]; }

    const std::vector<double>& nums(std::size_t c) const { return cols_[c].nums; }
    const std::vector<std::int32_t>& cats(std::size_t c) const { return cols_[c].cats; }

    const std::string& category_name(std::size_t c, std::int32_t idx) const {
        return schema_.columns[c].categories[static_cast<std::size_t>(idx)];
    }

    void set_num(std::size_t r, std::size_t c, double v) {
        if (!is_continuous(c)) throw TypeError("set_num on categorical column " + name(c));
        cols_[c].nums[r] = v;
    }

    void set_cat(std::size_t r, std::size_t c, std::int32_t idx) {
        if (is_continuous(c)) throw TypeError("set_cat on continuous column " + name(c));
        const auto count = schema_.columns[c].categories.size();
        if (idx < 0 || static_cast<std::size_t>(idx) >= count) {
            throw ArgumentError("set_cat: index " + std::to_string(idx) + " out of range for " +
                                name(c) + " (" + std::to_string(count) + " categories)");
        }
        cols_[c].cats[r] = idx;
    }

    void set_missing(std::size_t r, std::size_t c) {
        if (is_continuous(c)) {
            cols_[c].nums[r] = missing_num();
        } else {
            cols_[c].cats[r] = -1;
        }
    }

    // Index of the category, or -1 when it is not in the dictionary.
    std::int32_t find_category(std::size_t c, const std::string& value) const {
        const auto it = dict_[c].find(value);
        return it == dict_[c].end() ? -1 : it->second;
    }

    // Registers the category if new; returns its index either way.
    std::int32_t add_category(std::size_t c, const std::string& value) {
        if (is_continuous(c)) throw TypeError("add_category on continuous column " + name(c));
        const auto it = dict_[c].find(value);
        if (it != dict_[c].end()) return it->second;
        auto& cats = schema_.columns[c].categories;
        cats.push_back(value);
        const auto idx = static_cast<std::int32_t>(cats.size() - 1);
        dict_[c].emplace(value, idx);
        return idx;
    }

    std::size_t append_row() {
        for (std::size_t c = 0; c < schema_.size(); ++c) {
            if (is_continuous(c)) {
                cols_[c].nums.push_back(missing_num());
            } else {
                cols_[c].cats.push_back(-1);
            }
        }
        return n_rows_++;
    }

    // Bulk append from a table with the identical schema (same dictionaries).
    void append_rows(const DataTable& src) {
        if (src.schema_ != schema_) throw ShapeError("append_rows: schemas differ");
        for (std::size_t c = 0; c < schema_.size(); ++c) {
            auto& dst = cols_[c];
            const auto& from = src.cols_[c];
            dst.nums.insert(dst.nums.end(), from.nums.begin(), from.nums.end());
            dst.cats.insert(dst.cats.end(), from.cats.begin(), from.cats.end());
        }
        n_rows_ += src.n_rows_;
    }

    void copy_row_from(const DataTable& src, std::size_t src_row, std::size_t dst_row,
                       std::size_t src_col, std::size_t dst_col) {
        if (is_continuous(dst_col)) {
            cols_[dst_col].nums[dst_row] = src.cols_[src_col].nums[src_row];
        } else {
            const auto idx = src.cols_[src_col].cats[src_row];
            if (idx < 0) {
                cols_[dst_col].cats[dst_row] = -1;
            } else {
                cols_[dst_col].cats[dst_row] =
                    add_category(dst_col, src.category_name(src_col, idx));
            }
        }
    }

    void add_column(ColumnSpec spec, std::vector<double> nums) {
        if (spec.kind != ColumnKind::continuous) throw TypeError("add_column: kind/payload mismatch");
        if (nums.size() != n_rows_) throw ShapeError("add_column: row count mismatch");
        schema_.columns.push_back(std::move(spec));
        schema_.validate();
        cols_.push_back({std::move(nums), {}});
        dict_.emplace_back();
    }

    void add_column(ColumnSpec spec, std::vector<std::int32_t> cats) {
        if (spec.kind != ColumnKind::categorical) throw TypeError("add_column: kind/payload mismatch");
        if (cats.size() != n_rows_) throw ShapeError("add_column: row count mismatch");
        schema_.columns.push_back(std::move(spec));
        schema_.validate();
        cols_.push_back({{}, std::move(cats)});
        dict_.emplace_back();
        rebuild_dict(schema_.size() - 1);
    }

    bool has_missing() const {
        for (std::size_t c = 0; c < col_count(); ++c) {
            for (std::size_t r = 0; r < n_rows_; ++r) {
                if (missing(r, c)) return true;
            }
        }
        return false;
    }

    bool operator==(const DataTable& o) const {
        return schema_ == o.schema_ && cols_ == o.cols_ && n_rows_ == o.n_rows_;
    }

private:
    std::string name(std::size_t c) const { return schema_.columns[c].name; }

    // dict_ mirrors the schema's category lists for O(1) lookup.
    void rebuild_dict(std::size_t c) {
        dict_[c].clear();
        const auto& cats = schema_.columns[c].categories;
        for (std::size_t i = 0; i < cats.size(); ++i) {
            dict_[c].emplace(cats[i], static_cast<std::int32_t>(i));
        }
    }

    struct ColumnData {
        std::vector<double> nums;
        std::vector<std::int32_t> cats;

        bool operator==(const ColumnData& o) const {
            if (cats != o.cats || nums.size() != o.nums.size()) return false;
            for (std::size_t i = 0; i < nums.size(); ++i) {
                const bool na = std::isnan(nums[i]), nb = std::isnan(o.nums[i]);
                if (na != nb || (!na && nums[i] != o.nums[i])) return false;
            }
            return true;
        }
    };

    TableSchema schema_;
    std::vector<ColumnData> cols_;
    std::vector<std::unordered_map<std::string, std::int32_t>> dict_;
    std::size_t n_rows_ = 0;
};

}  // namespace tabgan
