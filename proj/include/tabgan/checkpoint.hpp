#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabgan/codec.hpp"
#include "tabgan/errors.hpp"
#include "tabgan/gan_config.hpp"
#include "tabgan/nn.hpp"
#include "tabgan/table.hpp"

namespace tabgan {

// Trained model bundle. File layout:
//   bytes 0..7    magic "DGGANCK1"
//   bytes 8..11   little-endian uint32 header length
//   header        UTF-8 JSON: version, config, schema, codec params, rng
//                 state, tensor manifest
//   payload       raw little-endian float64 tensors, in manifest order
struct Checkpoint {
    std::uint32_t version = 1;
    GanConfig config;
    TableSchema schema;
    CodecParams codec;
    MlpParams gen;
    MlpParams disc;
    std::string rng_state;
};

namespace detail {

constexpr char kCheckpointMagic[8] = {'D', 'G', 'G', 'A', 'N', 'C', 'K', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

inline std::uint32_t read_u32_le(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw IoError("checkpoint: truncated header length");
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline void write_f64_le(std::ostream& out, const std::vector<double>& values) {
    for (double v : values) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
        out.write(bytes, 8);
    }
}

inline void read_f64_le(std::istream& in, std::vector<double>& values, const std::string& name) {
    for (double& v : values) {
        unsigned char bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) throw IoError("checkpoint: truncated tensor data in " + name);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        v = std::bit_cast<double>(bits);
    }
}

struct TensorRef {
    std::string name;
    std::vector<double>* data;
    std::size_t rows;
    std::size_t cols;
};

inline std::vector<TensorRef> tensor_manifest(MlpParams& gen, MlpParams& disc) {
    return {
        {"gen.w1", &gen.w1.data, gen.w1.rows, gen.w1.cols},
        {"gen.b1", &gen.b1, 1, gen.b1.size()},
        {"gen.w2", &gen.w2.data, gen.w2.rows, gen.w2.cols},
        {"gen.b2", &gen.b2, 1, gen.b2.size()},
        {"disc.w1", &disc.w1.data, disc.w1.rows, disc.w1.cols},
        {"disc.b1", &disc.b1, 1, disc.b1.size()},
        {"disc.w2", &disc.w2.data, disc.w2.rows, disc.w2.cols},
        {"disc.b2", &disc.b2, 1, disc.b2.size()},
    };
}

}  // namespace detail

inline void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    Checkpoint copy = c;  // manifest wants mutable refs; shapes come from here
    auto tensors = detail::tensor_manifest(copy.gen, copy.disc);

    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& t : tensors) {
        manifest.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
    }
    const nlohmann::json header{{"version", detail::kCheckpointVersion},
                                {"config", gan_config_to_json(c.config)},
                                {"schema", schema_to_json(c.schema)},
                                {"codec", codec_params_to_json(c.codec)},
                                {"gen_slope", c.gen.negative_slope},
                                {"disc_slope", c.disc.negative_slope},
                                {"rng", c.rng_state},
                                {"tensors", manifest}};
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(detail::kCheckpointMagic, sizeof detail::kCheckpointMagic);
    detail::write_u32_le(out, static_cast<std::uint32_t>(header_text.size()));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& t : tensors) detail::write_f64_le(out, *t.data);
    if (!out) throw IoError("write failed: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, detail::kCheckpointMagic, 8) != 0) {
        throw FormatError(path.string() + ": not a checkpoint (bad magic)");
    }
    const std::uint32_t header_len = detail::read_u32_le(in);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), header_len);
    if (!in) throw IoError(path.string() + ": truncated header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": bad header JSON: " + e.what());
    }
    const auto version = header.at("version").get<std::uint32_t>();
    if (version != detail::kCheckpointVersion) {
        throw FormatError(path.string() + ": unsupported checkpoint version " +
                          std::to_string(version));
    }

    Checkpoint c;
    c.version = version;
    c.config = gan_config_from_json(header.at("config"));
    c.schema = schema_from_json(header.at("schema"));
    c.codec = codec_params_from_json(header.at("codec"));
    c.rng_state = header.at("rng").get<std::string>();
    c.gen.negative_slope = header.at("gen_slope").get<double>();
    c.disc.negative_slope = header.at("disc_slope").get<double>();

    const auto& manifest = header.at("tensors");
    if (!manifest.is_array() || manifest.size() != 8) {
        throw FormatError(path.string() + ": tensor manifest must list 8 tensors");
    }
    auto tensors = detail::tensor_manifest(c.gen, c.disc);
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& entry = manifest[i];
        if (entry.at("name").get<std::string>() != tensors[i].name) {
            throw FormatError(path.string() + ": unexpected tensor '" +
                              entry.at("name").get<std::string>() + "'");
        }
        const auto rows = entry.at("rows").get<std::size_t>();
        const auto cols = entry.at("cols").get<std::size_t>();
        if (tensors[i].name == "gen.w1") c.gen.w1 = Matrix(rows, cols);
        else if (tensors[i].name == "gen.b1") c.gen.b1.assign(cols, 0.0);
        else if (tensors[i].name == "gen.w2") c.gen.w2 = Matrix(rows, cols);
        else if (tensors[i].name == "gen.b2") c.gen.b2.assign(cols, 0.0);
        else if (tensors[i].name == "disc.w1") c.disc.w1 = Matrix(rows, cols);
        else if (tensors[i].name == "disc.b1") c.disc.b1.assign(cols, 0.0);
        else if (tensors[i].name == "disc.w2") c.disc.w2 = Matrix(rows, cols);
        else if (tensors[i].name == "disc.b2") c.disc.b2.assign(cols, 0.0);
    }
    // Re-resolve pointers now that the tensors have their final sizes.
    tensors = detail::tensor_manifest(c.gen, c.disc);
    for (auto& t : tensors) detail::read_f64_le(in, *t.data, t.name);
    c.gen.validate();
    c.disc.validate();
    return c;
}

}  // namespace tabgan
