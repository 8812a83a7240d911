#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabgan/errors.hpp"
#include "tabgan/matrix.hpp"
#include "tabgan/rng.hpp"
#include "tabgan/table.hpp"

namespace tabgan {

enum class NormMethod { max_absolute, min_max, standardization };

inline std::string to_string(NormMethod m) {
    switch (m) {
        case NormMethod::max_absolute: return "max_absolute";
        case NormMethod::min_max: return "min_max";
        case NormMethod::standardization: return "standardization";
    }
    return "min_max";
}

inline NormMethod norm_method_from_string(std::string_view s) {
    if (s == "max_absolute") return NormMethod::max_absolute;
    if (s == "min_max") return NormMethod::min_max;
    if (s == "standardization") return NormMethod::standardization;
    throw ParseError("unknown normalization method: " + std::string(s));
}

struct NormalizerParams {
    NormMethod method = NormMethod::min_max;
    double min = 0.0;
    double max = 0.0;
    double max_abs = 0.0;
    double mean = 0.0;
    double std = 0.0;
};

// Fits on the real data only; synthetic data is decoded with the same params.
// Standardization uses the population standard deviation.
inline NormalizerParams fit_normalizer(std::span<const double> values, NormMethod method,
                                       const std::string& column = "") {
    auto fail = [&](const std::string& why) {
        std::string msg = "fit_normalizer(" + to_string(method) + ")";
        if (!column.empty()) msg += " on column " + column;
        throw FitError(msg + ": " + why);
    };
    if (values.size() < 2) fail("needs at least 2 values");

    NormalizerParams p;
    p.method = method;
    switch (method) {
        case NormMethod::min_max: {
            p.min = values[0];
            p.max = values[0];
            for (double v : values) {
                p.min = std::min(p.min, v);
                p.max = std::max(p.max, v);
            }
            if (!(p.max > p.min)) fail("all values equal");
            break;
        }
        case NormMethod::max_absolute: {
            for (double v : values) p.max_abs = std::max(p.max_abs, std::abs(v));
            if (!(p.max_abs > 0.0)) fail("all values zero");
            break;
        }
        case NormMethod::standardization: {
            double sum = 0.0;
            for (double v : values) sum += v;
            p.mean = sum / static_cast<double>(values.size());
            double ss = 0.0;
            for (double v : values) ss += (v - p.mean) * (v - p.mean);
            p.std = std::sqrt(ss / static_cast<double>(values.size()));
            if (!(p.std > 0.0)) fail("zero variance");
            break;
        }
    }
    return p;
}

inline double normalize(double x, const NormalizerParams& p) {
    switch (p.method) {
        case NormMethod::min_max: return (x - p.min) / (p.max - p.min);
        case NormMethod::max_absolute: return x / p.max_abs;
        case NormMethod::standardization: return (x - p.mean) / p.std;
    }
    return x;
}

// Exact algebraic inverse; min_max inputs are clamped to [0,1] first so
// out-of-range generator outputs land inside the real data range.
inline double denormalize(double y, const NormalizerParams& p) {
    switch (p.method) {
        case NormMethod::min_max: {
            const double t = std::min(1.0, std::max(0.0, y));
            return t * (p.max - p.min) + p.min;
        }
        case NormMethod::max_absolute: return y * p.max_abs;
        case NormMethod::standardization: return y * p.std + p.mean;
    }
    return y;
}

// One contiguous span of the encoded row. Continuous columns occupy width 1,
// categorical columns one slot per category.
struct Block {
    std::size_t offset = 0;
    std::size_t width = 1;
    bool categorical = false;
    NormMethod norm = NormMethod::min_max;  // continuous blocks only
};

struct BlockLayout {
    std::vector<Block> blocks;
    std::size_t total_width = 0;
};

struct CodecParams {
    // One entry per schema column; disengaged for categorical columns.
    std::vector<std::optional<NormalizerParams>> normalizers;
};

inline BlockLayout make_layout(const TableSchema& schema, const CodecParams& params) {
    if (params.normalizers.size() != schema.size()) {
        throw EncodeError("make_layout: codec params cover " +
                          std::to_string(params.normalizers.size()) + " columns, schema has " +
                          std::to_string(schema.size()));
    }
    BlockLayout layout;
    std::size_t offset = 0;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        Block b;
        b.offset = offset;
        if (schema.columns[c].kind == ColumnKind::categorical) {
            b.categorical = true;
            b.width = schema.columns[c].categories.size();
            if (b.width == 0) {
                throw EncodeError("make_layout: column " + schema.columns[c].name +
                                  " has no categories");
            }
        } else {
            b.width = 1;
            b.norm = params.normalizers[c] ? params.normalizers[c]->method : NormMethod::min_max;
        }
        offset += b.width;
        layout.blocks.push_back(b);
    }
    layout.total_width = offset;
    return layout;
}

struct EncodedMatrix {
    BlockLayout layout;
    Matrix data;
};

// Normalizes continuous columns and one-hot encodes categorical ones.
// `methods` may be empty (min_max everywhere) or give one method per column
// (entries for categorical columns are ignored).
inline std::pair<EncodedMatrix, CodecParams> encode_table(const DataTable& table,
                                                          const std::vector<NormMethod>& methods = {}) {
    const auto& schema = table.schema();
    if (!methods.empty() && methods.size() != schema.size()) {
        throw EncodeError("encode_table: method list covers " + std::to_string(methods.size()) +
                          " columns, table has " + std::to_string(schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            if (table.missing(r, c)) {
                throw EncodeError("encode_table: missing cell at row " + std::to_string(r + 1) +
                                  ", column '" + schema.columns[c].name + "'");
            }
        }
    }

    CodecParams params;
    params.normalizers.resize(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (schema.columns[c].kind != ColumnKind::continuous) continue;
        const NormMethod m = methods.empty() ? NormMethod::min_max : methods[c];
        params.normalizers[c] = fit_normalizer(table.nums(c), m, schema.columns[c].name);
    }

    EncodedMatrix enc;
    enc.layout = make_layout(schema, params);
    enc.data = Matrix(table.row_count(), enc.layout.total_width);
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        double* row = enc.data.row(r);
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const Block& b = enc.layout.blocks[c];
            if (b.categorical) {
                row[b.offset + static_cast<std::size_t>(table.cat(r, c))] = 1.0;
            } else {
                row[b.offset] = normalize(table.num(r, c), *params.normalizers[c]);
            }
        }
    }
    return {std::move(enc), std::move(params)};
}

namespace detail {

inline void check_decode_layout(const EncodedMatrix& m, const TableSchema& schema,
                                const CodecParams& params) {
    const BlockLayout expected = make_layout(schema, params);
    if (expected.total_width != m.layout.total_width ||
        expected.blocks.size() != m.layout.blocks.size() || m.data.cols != expected.total_width) {
        throw DecodeError("decode_matrix: layout (width " +
                          std::to_string(m.layout.total_width) + ") does not match schema (width " +
                          std::to_string(expected.total_width) + ")");
    }
    for (std::size_t c = 0; c < expected.blocks.size(); ++c) {
        if (expected.blocks[c].offset != m.layout.blocks[c].offset ||
            expected.blocks[c].width != m.layout.blocks[c].width ||
            expected.blocks[c].categorical != m.layout.blocks[c].categorical) {
            throw DecodeError("decode_matrix: block " + std::to_string(c) +
                              " does not match the schema layout");
        }
    }
}

}  // namespace detail

// Inverts encode_table. Categorical blocks decode by argmax, ties toward the
// lowest category index, so any real-valued block yields a valid category.
inline DataTable decode_matrix(const EncodedMatrix& m, const TableSchema& schema,
                               const CodecParams& params) {
    detail::check_decode_layout(m, schema, params);
    DataTable out(schema, m.data.rows);
    for (std::size_t r = 0; r < m.data.rows; ++r) {
        const double* row = m.data.row(r);
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const Block& b = m.layout.blocks[c];
            if (b.categorical) {
                std::size_t best = 0;
                for (std::size_t k = 1; k < b.width; ++k) {
                    if (row[b.offset + k] > row[b.offset + best]) best = k;
                }
                out.set_cat(r, c, static_cast<std::int32_t>(best));
            } else {
                out.set_num(r, c, denormalize(row[b.offset], *params.normalizers[c]));
            }
        }
    }
    return out;
}

// Experimental sampling decode: categorical blocks are sampled with
// probability proportional to their (negatives clamped to 0) entries instead
// of taking the argmax. Falls back to argmax for an all-nonpositive block.
inline DataTable decode_matrix_sampled(const EncodedMatrix& m, const TableSchema& schema,
                                       const CodecParams& params, Rng& rng) {
    detail::check_decode_layout(m, schema, params);
    DataTable out(schema, m.data.rows);
    for (std::size_t r = 0; r < m.data.rows; ++r) {
        const double* row = m.data.row(r);
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const Block& b = m.layout.blocks[c];
            if (!b.categorical) {
                out.set_num(r, c, denormalize(row[b.offset], *params.normalizers[c]));
                continue;
            }
            double total = 0.0;
            for (std::size_t k = 0; k < b.width; ++k) total += std::max(0.0, row[b.offset + k]);
            std::size_t pick = 0;
            if (total > 0.0) {
                const double u = rng.uniform01() * total;
                double acc = 0.0;
                for (std::size_t k = 0; k < b.width; ++k) {
                    acc += std::max(0.0, row[b.offset + k]);
                    if (u < acc) {
                        pick = k;
                        break;
                    }
                }
            } else {
                for (std::size_t k = 1; k < b.width; ++k) {
                    if (row[b.offset + k] > row[b.offset + pick]) pick = k;
                }
            }
            out.set_cat(r, c, static_cast<std::int32_t>(pick));
        }
    }
    return out;
}

inline nlohmann::json codec_params_to_json(const CodecParams& params) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& n : params.normalizers) {
        if (!n) {
            out.push_back(nullptr);
            continue;
        }
        nlohmann::json j{{"method", to_string(n->method)}};
        switch (n->method) {
            case NormMethod::min_max:
                j["min"] = n->min;
                j["max"] = n->max;
                break;
            case NormMethod::max_absolute:
                j["max_abs"] = n->max_abs;
                break;
            case NormMethod::standardization:
                j["mean"] = n->mean;
                j["std"] = n->std;
                break;
        }
        out.push_back(std::move(j));
    }
    return out;
}

inline CodecParams codec_params_from_json(const nlohmann::json& j) {
    CodecParams params;
    if (!j.is_array()) throw ParseError("codec params JSON: expected an array");
    for (const auto& item : j) {
        if (item.is_null()) {
            params.normalizers.emplace_back();
            continue;
        }
        NormalizerParams n;
        n.method = norm_method_from_string(item.at("method").get<std::string>());
        switch (n.method) {
            case NormMethod::min_max:
                n.min = item.at("min").get<double>();
                n.max = item.at("max").get<double>();
                break;
            case NormMethod::max_absolute:
                n.max_abs = item.at("max_abs").get<double>();
                break;
            case NormMethod::standardization:
                n.mean = item.at("mean").get<double>();
                n.std = item.at("std").get<double>();
                break;
        }
        params.normalizers.push_back(n);
    }
    return params;
}

}  // namespace tabgan
