#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tabgan/codec.hpp"
#include "tabgan/rng.hpp"
#include "tabgan/table.hpp"

using namespace tabgan;
using Catch::Approx;

namespace {

TableSchema mixed_schema() {
    TableSchema s;
    s.columns.push_back({"value", ColumnKind::continuous, {}});
    s.columns.push_back({"label", ColumnKind::categorical, {"A", "B", "C"}});
    return s;
}

// Random table with one continuous and two categorical columns.
DataTable random_table(Rng& rng, std::size_t rows) {
    TableSchema s;
    s.columns.push_back({"v", ColumnKind::continuous, {}});
    s.columns.push_back({"c1", ColumnKind::categorical, {"a", "b", "c", "d"}});
    s.columns.push_back({"c2", ColumnKind::categorical, {"x", "y"}});
    DataTable t(s, rows);
    for (std::size_t r = 0; r < rows; ++r) {
        t.set_num(r, 0, rng.normal() * 50.0 + 10.0);
        t.set_cat(r, 1, static_cast<std::int32_t>(rng.below(4)));
        t.set_cat(r, 2, static_cast<std::int32_t>(rng.below(2)));
    }
    // keep min_max fit valid
    t.set_num(0, 0, -100.0);
    t.set_num(rows - 1, 0, 100.0);
    return t;
}

}  // namespace

TEST_CASE("fit_normalizer per-method statistics") {
    const std::vector<double> mm{0.0, 5.0, 10.0};
    const NormalizerParams pm = fit_normalizer(mm, NormMethod::min_max);
    CHECK(pm.min == 0.0);
    CHECK(pm.max == 10.0);

    const std::vector<double> ma{-4.0, 2.0};
    CHECK(fit_normalizer(ma, NormMethod::max_absolute).max_abs == 4.0);

    const std::vector<double> st{1.0, 2.0, 3.0, 4.0};
    const NormalizerParams ps = fit_normalizer(st, NormMethod::standardization);
    CHECK(ps.mean == Approx(2.5));
    CHECK(ps.std == Approx(1.1180).margin(1e-4));  // population std
}

TEST_CASE("fit_normalizer rejects degenerate inputs") {
    const std::vector<double> constant{3.0, 3.0, 3.0};
    const std::vector<double> zeros{0.0, 0.0};
    const std::vector<double> single{1.0};
    CHECK_THROWS_AS(fit_normalizer(constant, NormMethod::min_max), FitError);
    CHECK_THROWS_AS(fit_normalizer(constant, NormMethod::standardization), FitError);
    CHECK_THROWS_AS(fit_normalizer(zeros, NormMethod::max_absolute), FitError);
    CHECK_THROWS_AS(fit_normalizer(single, NormMethod::min_max), FitError);
    CHECK_THROWS_WITH(fit_normalizer(constant, NormMethod::min_max, "age"),
                      Catch::Matchers::ContainsSubstring("min_max") &&
                          Catch::Matchers::ContainsSubstring("age"));
}

TEST_CASE("normalize and denormalize are inverse") {
    const std::vector<double> base{0.0, 5.0, 10.0};
    const NormalizerParams mm = fit_normalizer(base, NormMethod::min_max);
    CHECK(normalize(10.0, mm) == Approx(1.0));

    const std::vector<double> st{1.0, 2.5, 4.0};
    const NormalizerParams ps = fit_normalizer(st, NormMethod::standardization);
    CHECK(normalize(2.5, ps) == Approx(0.0).margin(1e-15));

    Rng rng(5);
    const NormalizerParams ma = fit_normalizer(base, NormMethod::max_absolute);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform01() * 10.0;  // inside the fitted range
        for (const auto& p : {mm, ma, ps}) {
            CHECK(denormalize(normalize(x, p), p) == Approx(x).margin(1e-9));
        }
    }

    // min_max denormalize clamps before inverting
    CHECK(denormalize(1.7, mm) == 10.0);
    CHECK(denormalize(-0.3, mm) == 0.0);
}

TEST_CASE("encode_table lays out blocks") {
    DataTable t(mixed_schema(), 2);
    t.set_num(0, 0, 0.0);
    t.set_num(1, 0, 10.0);
    t.set_cat(0, 1, 1);
    t.set_cat(1, 1, 2);
    const auto [enc, params] = encode_table(t);
    REQUIRE(enc.layout.total_width == 4);
    REQUIRE(enc.data.rows == 2);
    CHECK(enc.data.at(0, 0) == Approx(0.0));
    CHECK(enc.data.at(1, 0) == Approx(1.0));
    CHECK(enc.data.at(0, 2) == 1.0);  // B hot
    CHECK(enc.data.at(0, 1) == 0.0);
    CHECK(enc.data.at(1, 3) == 1.0);  // C hot
    CHECK(params.normalizers[0]->method == NormMethod::min_max);
    CHECK_FALSE(params.normalizers[1].has_value());
}

TEST_CASE("encoded width is the sum of category counts for all-categorical tables") {
    TableSchema s;
    s.columns.push_back({"a", ColumnKind::categorical, {"1", "2"}});
    s.columns.push_back({"b", ColumnKind::categorical, {"1", "2", "3", "4", "5"}});
    DataTable t(s, 1);
    t.set_cat(0, 0, 0);
    t.set_cat(0, 1, 4);
    const auto [enc, params] = encode_table(t);
    CHECK(enc.layout.total_width == 7);
}

TEST_CASE("encode_table names the missing cell") {
    DataTable t(mixed_schema(), 2);
    t.set_num(0, 0, 1.0);
    t.set_num(1, 0, 2.0);
    t.set_cat(0, 1, 0);
    CHECK_THROWS_WITH(encode_table(t), Catch::Matchers::ContainsSubstring("row 2") &&
                                           Catch::Matchers::ContainsSubstring("label"));
}

TEST_CASE("decode_matrix argmax and tie rules") {
    CodecParams params;
    params.normalizers.resize(1);
    TableSchema s;
    s.columns.push_back({"c", ColumnKind::categorical, {"A", "B", "C"}});
    EncodedMatrix m;
    m.layout = make_layout(s, params);
    m.data = Matrix(2, 3);
    m.data.at(0, 0) = 0.1;
    m.data.at(0, 1) = 0.7;
    m.data.at(0, 2) = 0.2;
    m.data.at(1, 0) = 0.5;
    m.data.at(1, 1) = 0.5;
    m.data.at(1, 2) = 0.0;
    const DataTable out = decode_matrix(m, s, params);
    CHECK(out.category_name(0, out.cat(0, 0)) == "B");
    CHECK(out.category_name(0, out.cat(1, 0)) == "A");  // tie goes low
}

TEST_CASE("decode_matrix rejects a layout mismatch") {
    DataTable t(mixed_schema(), 2);
    t.set_num(0, 0, 0.0);
    t.set_num(1, 0, 1.0);
    t.set_cat(0, 1, 0);
    t.set_cat(1, 1, 1);
    auto [enc, params] = encode_table(t);
    TableSchema other;
    other.columns.push_back({"c", ColumnKind::categorical, {"A", "B"}});
    CodecParams other_params;
    other_params.normalizers.resize(1);
    CHECK_THROWS_AS(decode_matrix(enc, other, other_params), DecodeError);
}

TEST_CASE("arbitrary real-valued blocks decode to valid categories") {
    TableSchema s;
    s.columns.push_back({"c", ColumnKind::categorical, {"A", "B", "C", "D"}});
    CodecParams params;
    params.normalizers.resize(1);
    EncodedMatrix m;
    m.layout = make_layout(s, params);
    Rng rng(11);
    m.data = rng.normal_matrix(50, 4, 10.0);
    const DataTable out = decode_matrix(m, s, params);
    for (std::size_t r = 0; r < out.row_count(); ++r) {
        CHECK(out.cat(r, 0) >= 0);
        CHECK(out.cat(r, 0) < 4);
    }
}

TEST_CASE("encode then decode is the identity") {
    Rng rng(13);
    for (int round = 0; round < 25; ++round) {
        const DataTable t = random_table(rng, 20);
        for (const NormMethod m :
             {NormMethod::min_max, NormMethod::max_absolute, NormMethod::standardization}) {
            const std::vector<NormMethod> methods(t.schema().size(), m);
            const auto [enc, params] = encode_table(t, methods);
            const DataTable back = decode_matrix(enc, t.schema(), params);
            for (std::size_t r = 0; r < t.row_count(); ++r) {
                CHECK(back.num(r, 0) == Approx(t.num(r, 0)).margin(1e-9));
                CHECK(back.cat(r, 1) == t.cat(r, 1));
                CHECK(back.cat(r, 2) == t.cat(r, 2));
            }
        }
    }
}

TEST_CASE("one-hot-valid matrices survive decode then encode") {
    Rng rng(17);
    const DataTable t = random_table(rng, 30);
    const auto [enc, params] = encode_table(t);
    const DataTable decoded = decode_matrix(enc, t.schema(), params);
    const auto [enc2, params2] = encode_table(decoded, {});
    for (std::size_t i = 0; i < enc.data.data.size(); ++i) {
        CHECK(enc2.data.data[i] == Approx(enc.data.data[i]).margin(1e-12));
    }
}

TEST_CASE("sampling decode is deterministic per seed and respects support") {
    TableSchema s;
    s.columns.push_back({"c", ColumnKind::categorical, {"A", "B", "C"}});
    CodecParams params;
    params.normalizers.resize(1);
    EncodedMatrix m;
    m.layout = make_layout(s, params);
    m.data = Matrix(200, 3);
    for (std::size_t r = 0; r < 200; ++r) {
        m.data.at(r, 0) = 0.6;
        m.data.at(r, 1) = 0.4;
        m.data.at(r, 2) = 0.0;  // never sampled
    }
    Rng r1(7), r2(7);
    const DataTable a = decode_matrix_sampled(m, s, params, r1);
    const DataTable b = decode_matrix_sampled(m, s, params, r2);
    CHECK(a == b);
    bool saw_b = false;
    for (std::size_t r = 0; r < a.row_count(); ++r) {
        CHECK(a.cat(r, 0) != 2);
        saw_b = saw_b || a.cat(r, 0) == 1;
    }
    CHECK(saw_b);
}

TEST_CASE("codec params JSON round-trip") {
    Rng rng(19);
    const DataTable t = random_table(rng, 25);
    const auto [enc, params] = encode_table(t);
    const CodecParams back = codec_params_from_json(codec_params_to_json(params));
    REQUIRE(back.normalizers.size() == params.normalizers.size());
    CHECK(back.normalizers[0]->method == params.normalizers[0]->method);
    CHECK(back.normalizers[0]->min == params.normalizers[0]->min);
    CHECK(back.normalizers[0]->max == params.normalizers[0]->max);
    CHECK_FALSE(back.normalizers[1].has_value());
}
