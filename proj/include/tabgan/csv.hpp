#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <system_error>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tabgan/errors.hpp"
#include "tabgan/table.hpp"

namespace tabgan {

inline std::vector<std::string> default_missing_tokens() { return {"", "NA", "?"}; }

struct LoadOptions {
    std::optional<TableSchema> schema;
    // Case-insensitive (name, kind) hints applied when no schema is given;
    // unlisted columns fall back to inference.
    std::vector<std::pair<std::string, ColumnKind>> kind_overrides;
    std::vector<std::string> missing_tokens = default_missing_tokens();
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    if (begin == end) return false;
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// RFC-4180 records: comma-separated, optional quoting with "" escapes,
// quoted fields may contain commas and newlines.
inline std::vector<std::vector<std::string>> read_csv_records(std::istream& in,
                                                              const std::string& where) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any_char = false;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        any_char = false;
    };

    char ch;
    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                any_char = true;
                break;
            case ',':
                end_field();
                any_char = true;
                break;
            case '\r':
                break;
            case '\n':
                // blank lines carry no record
                if (any_char || !field.empty() || !record.empty()) end_record();
                break;
            default:
                field.push_back(ch);
                any_char = true;
        }
    }
    if (in_quotes) throw ParseError(where + ": unterminated quoted field");
    if (any_char || !field.empty() || !record.empty()) end_record();
    return records;
}

inline bool is_missing(const std::string& s, const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
        if (s == t) return true;
    }
    return false;
}

}  // namespace detail

inline DataTable load_csv(const std::filesystem::path& path, const LoadOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    auto records = detail::read_csv_records(in, path.string());
    if (records.empty()) throw ParseError(path.string() + ": no header row");

    const auto& header = records.front();
    const std::size_t width = header.size();

    // Ragged-row check; data rows are numbered from 1.
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw ParseError(path.string() + ": ragged row " + std::to_string(r) + " has " +
                             std::to_string(records[r].size()) + " fields, expected " +
                             std::to_string(width));
        }
    }

    TableSchema schema;
    if (opts.schema) {
        schema = *opts.schema;
        if (schema.size() != width) {
            throw ParseError(path.string() + ": header has " + std::to_string(width) +
                             " columns, schema declares " + std::to_string(schema.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (schema.columns[c].name != header[c]) {
                throw ParseError(path.string() + ": header column '" + header[c] +
                                 "' does not match schema column '" + schema.columns[c].name + "'");
            }
        }
    } else {
        auto overridden = [&](const std::string& name) -> std::optional<ColumnKind> {
            for (const auto& [n, k] : opts.kind_overrides) {
                if (n.size() == name.size() &&
                    std::equal(n.begin(), n.end(), name.begin(), [](char a, char b) {
                        return std::tolower(static_cast<unsigned char>(a)) ==
                               std::tolower(static_cast<unsigned char>(b));
                    })) {
                    return k;
                }
            }
            return std::nullopt;
        };
        // Inference: continuous iff every non-missing cell parses as a number
        // and there are more than 20 distinct values.
        for (std::size_t c = 0; c < width; ++c) {
            ColumnSpec spec;
            spec.name = header[c];
            if (auto k = overridden(header[c])) {
                spec.kind = *k;
            } else {
                bool all_numeric = true;
                std::set<double> distinct;
                for (std::size_t r = 1; r < records.size() && all_numeric; ++r) {
                    const auto& cell = records[r][c];
                    if (detail::is_missing(cell, opts.missing_tokens)) continue;
                    double v;
                    if (detail::parse_double(cell, v)) {
                        distinct.insert(v);
                    } else {
                        all_numeric = false;
                    }
                }
                spec.kind = (all_numeric && distinct.size() > 20) ? ColumnKind::continuous
                                                                  : ColumnKind::categorical;
            }
            schema.columns.push_back(std::move(spec));
        }
    }
    schema.validate();

    DataTable table(schema, records.size() - 1);

    // Declared dictionaries are closed; inferred ones grow in
    // first-appearance order.
    std::vector<bool> closed(width, false);
    for (std::size_t c = 0; c < width; ++c) {
        closed[c] = opts.schema && !schema.columns[c].categories.empty();
    }

    for (std::size_t r = 1; r < records.size(); ++r) {
        const std::size_t row = r - 1;
        for (std::size_t c = 0; c < width; ++c) {
            const auto& cell = records[r][c];
            if (detail::is_missing(cell, opts.missing_tokens)) continue;
            if (table.is_continuous(c)) {
                double v;
                if (!detail::parse_double(cell, v)) {
                    throw ParseError(path.string() + ": row " + std::to_string(r) + ", column '" +
                                     header[c] + "': cannot parse '" + cell + "' as a number");
                }
                table.set_num(row, c, v);
                continue;
            }
            if (closed[c]) {
                const std::int32_t idx = table.find_category(c, cell);
                if (idx < 0) {
                    throw ParseError(path.string() + ": row " + std::to_string(r) + ", column '" +
                                     header[c] + "': value '" + cell +
                                     "' is not in the declared categories");
                }
                table.set_cat(row, c, idx);
            } else {
                table.set_cat(row, c, table.add_category(c, cell));
            }
        }
    }
    return table;
}

inline DataTable load_csv(const std::filesystem::path& path,
                          const std::optional<TableSchema>& schema,
                          const std::vector<std::string>& missing_tokens = default_missing_tokens()) {
    LoadOptions opts;
    opts.schema = schema;
    opts.missing_tokens = missing_tokens;
    return load_csv(path, opts);
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

// Writes the same dialect load_csv reads; missing cells become empty fields.
inline void save_csv(const DataTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const auto& cols = table.schema().columns;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out << ',';
        out << detail::csv_escape(cols[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out << ',';
            if (table.missing(r, c)) continue;
            if (table.is_continuous(c)) {
                out << detail::format_double(table.num(r, c));
            } else {
                out << detail::csv_escape(table.category_name(c, table.cat(r, c)));
            }
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline void save_schema(const TableSchema& schema, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << schema_to_json(schema).dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

inline TableSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return schema_from_json(j);
}

}  // namespace tabgan
