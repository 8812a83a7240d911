#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "tabgan/csv.hpp"
#include "tabgan/rng.hpp"

using namespace tabgan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("tabgan_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(const std::string& args, const fs::path& stdout_file = {}) {
    std::string cmd = std::string(TABGAN_CLI_PATH) + " " + args;
    if (!stdout_file.empty()) {
        cmd += " >" + stdout_file.string() + " 2>&1";
    } else {
        cmd += " >/dev/null 2>&1";
    }
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fixture(const std::string& name) { return fs::path(TABGAN_FIXTURES_DIR) / name; }

// Small mixed table used by the train/evaluate flows.
fs::path write_toy_csv(const TempDir& dir, std::size_t rows = 240) {
    const fs::path p = dir.path / "toy.csv";
    std::ofstream out(p);
    out << "value,flag,bucket\n";
    Rng rng(500);
    for (std::size_t r = 0; r < rows; ++r) {
        out << (rng.normal() * 2.0 + 5.0) << ',' << (rng.uniform01() < 0.8 ? "on" : "off") << ','
            << "b" << rng.below(3) << '\n';
    }
    return p;
}

std::string toy_flags(const TempDir& dir, const fs::path& data, std::uint64_t seed) {
    return "train --data " + data.string() + " --schema " + (dir.path / "toy_schema.json").string() +
           " --schedule geometric --epochs 3 --first-item 2 --synthetic-count 150" +
           " --noise-dim 6 --gen-hidden 12 --disc-hidden 12 --batch-size 60 --seed " +
           std::to_string(seed);
}

}  // namespace

TEST_CASE("cli prepare generic reports counts and writes both outputs") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    const fs::path out_csv = dir.path / "prep.csv";
    const fs::path out_schema = dir.path / "prep_schema.json";
    const fs::path log = dir.path / "stdout.txt";
    const int rc = run("prepare --input " + data.string() + " --recipe generic --output " +
                           out_csv.string() + " --schema-out " + out_schema.string(),
                       log);
    CHECK(rc == 0);
    CHECK(slurp(log).find("240 rows, 3 columns") != std::string::npos);
    CHECK(fs::exists(out_csv));
    CHECK(load_schema(out_schema).size() == 3);
}

TEST_CASE("cli prepare olympic matches the bundled expectation") {
    TempDir dir;
    const fs::path out_csv = dir.path / "olympic.csv";
    const fs::path out_schema = dir.path / "olympic_schema.json";
    const fs::path log = dir.path / "stdout.txt";
    const int rc = run("prepare --input " + fixture("olympic_raw_20.csv").string() +
                           " --recipe olympic --output " + out_csv.string() + " --schema-out " +
                           out_schema.string(),
                       log);
    REQUIRE(rc == 0);
    CHECK(slurp(log).find("16 rows, 11 columns") != std::string::npos);
    CHECK(slurp(out_csv) == slurp(fixture("olympic_prepared_expected.csv")));
}

TEST_CASE("cli prepare missing input exits with code 2") {
    TempDir dir;
    const fs::path log = dir.path / "stdout.txt";
    const int rc = run("prepare --input " + (dir.path / "nope.csv").string() + " --output " +
                           (dir.path / "o.csv").string() + " --schema-out " +
                           (dir.path / "s.json").string(),
                       log);
    CHECK(rc == 2);
    CHECK(slurp(log).find("nope.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path / "o.csv"));
}

TEST_CASE("cli train is deterministic and writes a parsable log") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "toy_prepared.csv").string() + " --schema-out " +
                (dir.path / "toy_schema.json").string()) == 0);

    auto train_once = [&](const std::string& tag) {
        const std::string args = toy_flags(dir, data, 4242) + " --out-model " +
                                 (dir.path / (tag + ".ckpt")).string() + " --out-synth " +
                                 (dir.path / (tag + ".csv")).string() + " --log " +
                                 (dir.path / (tag + ".jsonl")).string();
        return run(args);
    };
    REQUIRE(train_once("a") == 0);
    REQUIRE(train_once("b") == 0);
    CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
    CHECK(slurp(dir.path / "a.ckpt") == slurp(dir.path / "b.ckpt"));

    std::ifstream log(dir.path / "a.jsonl");
    std::string line;
    std::size_t lines = 0, cumulative = 0;
    while (std::getline(log, line)) {
        const json j = json::parse(line);
        ++lines;
        CHECK(j.at("epoch") == lines);
        cumulative += j.at("quota").get<std::size_t>();
        CHECK(j.at("cumulative_quota") == cumulative);
    }
    CHECK(lines == 3);
    CHECK(cumulative == 150);

    const DataTable synth =
        load_csv(dir.path / "a.csv", load_schema(dir.path / "toy_schema.json"));
    CHECK(synth.row_count() == 150);
}

TEST_CASE("cli generate honors count, schema and seed") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "toy_schema.json").string()) == 0);
    REQUIRE(run(toy_flags(dir, data, 7) + " --out-model " + (dir.path / "m.ckpt").string() +
                " --out-synth " + (dir.path / "s.csv").string()) == 0);

    const fs::path empty_csv = dir.path / "empty.csv";
    REQUIRE(run("generate --model " + (dir.path / "m.ckpt").string() + " --count 0 --out " +
                empty_csv.string()) == 0);
    CHECK(slurp(empty_csv) == "value,flag,bucket\n");

    const fs::path g1 = dir.path / "g1.csv";
    const fs::path g2 = dir.path / "g2.csv";
    REQUIRE(run("generate --model " + (dir.path / "m.ckpt").string() +
                " --count 40 --seed 11 --out " + g1.string()) == 0);
    REQUIRE(run("generate --model " + (dir.path / "m.ckpt").string() +
                " --count 40 --seed 11 --out " + g2.string()) == 0);
    CHECK(slurp(g1) == slurp(g2));
    const DataTable rows = load_csv(g1, load_schema(dir.path / "toy_schema.json"));
    CHECK(rows.row_count() == 40);
}

TEST_CASE("cli evaluate scores identity as 1.0 and emits charts") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "schema.json").string()) == 0);
    const fs::path report = dir.path / "report.json";
    const fs::path charts = dir.path / "charts";
    REQUIRE(run("evaluate --real " + (dir.path / "p.csv").string() + " --synth " +
                (dir.path / "p.csv").string() + " --schema " + (dir.path / "schema.json").string() +
                " --report " + report.string() + " --charts " + charts.string()) == 0);
    const json j = json::parse(slurp(report));
    CHECK(j.at("averages").at("overall") == 1.0);
    CHECK(j.at("config").at("small_threshold") == 15);
    CHECK(fs::exists(charts / "value.svg"));
    CHECK(fs::exists(charts / "value_freq.csv"));
    CHECK(fs::exists(charts / "flag_freq.csv"));
    CHECK(fs::exists(charts / "pair_heatmap.svg"));
    CHECK(fs::exists(charts / "pair_matrix.csv"));

    // chart CSV sums to ~1 per side
    std::ifstream freq(charts / "flag_freq.csv");
    std::string line;
    std::getline(freq, line);
    CHECK(line == "label,real,synthetic");
}

TEST_CASE("cli evaluate reruns byte-identically") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "toy_schema.json").string()) == 0);
    REQUIRE(run(toy_flags(dir, data, 21) + " --out-model " + (dir.path / "m.ckpt").string() +
                " --out-synth " + (dir.path / "s.csv").string()) == 0);
    // identical flags both times; outputs are overwritten in place
    auto eval_once = [&] {
        return run("evaluate --real " + (dir.path / "p.csv").string() + " --synth " +
                   (dir.path / "s.csv").string() + " --schema " +
                   (dir.path / "toy_schema.json").string() + " --report " +
                   (dir.path / "report.json").string() + " --charts " +
                   (dir.path / "charts").string());
    };
    REQUIRE(eval_once() == 0);
    const std::string report_first = slurp(dir.path / "report.json");
    const std::string heatmap_first = slurp(dir.path / "charts" / "pair_heatmap.svg");
    const std::string freq_first = slurp(dir.path / "charts" / "value_freq.csv");
    REQUIRE(eval_once() == 0);
    CHECK(slurp(dir.path / "report.json") == report_first);
    CHECK(slurp(dir.path / "charts" / "pair_heatmap.svg") == heatmap_first);
    CHECK(slurp(dir.path / "charts" / "value_freq.csv") == freq_first);
}

TEST_CASE("cli evaluate removes the report when chart output fails") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "schema.json").string()) == 0);
    const fs::path blocker = dir.path / "blocked";
    std::ofstream(blocker) << "not a directory";
    const fs::path report = dir.path / "report.json";
    const int rc = run("evaluate --real " + (dir.path / "p.csv").string() + " --synth " +
                       (dir.path / "p.csv").string() + " --schema " +
                       (dir.path / "schema.json").string() + " --report " + report.string() +
                       " --charts " + blocker.string());
    CHECK(rc == 1);
    CHECK_FALSE(fs::exists(report));
}

TEST_CASE("cli evaluate fails on a schema/data mismatch") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "schema.json").string()) == 0);
    const fs::path other = dir.path / "other.csv";
    std::ofstream(other) << "wrong,header\n1,2\n";
    CHECK(run("evaluate --real " + (dir.path / "p.csv").string() + " --synth " + other.string() +
              " --schema " + (dir.path / "schema.json").string() + " --report " +
              (dir.path / "r.json").string()) == 1);
    CHECK_FALSE(fs::exists(dir.path / "r.json"));
}

TEST_CASE("cli tune writes the single-cell report") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir, 180);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "schema.json").string()) == 0);
    const fs::path report = dir.path / "tune.json";
    REQUIRE(run("tune --data " + data.string() + " --schema " +
                (dir.path / "schema.json").string() +
                " --epoch-grid 2 --first-item-grid 1.5 --report " + report.string() +
                " --noise-dim 6 --gen-hidden 10 --disc-hidden 10 --batch-size 60 --seed 3") == 0);
    const json j = json::parse(slurp(report));
    CHECK(j.at("scores").size() == 1);
    CHECK(j.at("scores")[0].size() == 1);
    CHECK(j.at("best").at("epochs") == 2);
    CHECK(j.at("best").at("first_item") == 1.5);
    CHECK(j.at("config").at("seed") == 3);
}

TEST_CASE("cli config file merges under explicit flags") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "schema.json").string()) == 0);
    const fs::path cfg = dir.path / "cfg.json";
    std::ofstream(cfg) << R"({"noise_dim": 6, "gen_hidden": 12, "disc_hidden": 12,
                             "batch_size": 60, "epochs": 2, "seed": 9})";
    const fs::path model = dir.path / "m.ckpt";
    REQUIRE(run("train --data " + data.string() + " --config " + cfg.string() +
                " --schedule uniform --epochs 3 --out-model " + model.string() + " --out-synth " +
                (dir.path / "s.csv").string()) == 0);
    // --epochs 3 beats the config file's 2
    std::ifstream in(model, std::ios::binary);
    in.seekg(12);
    std::string header(4096, '\0');
    in.read(header.data(), 4096);
    CHECK(header.find("\"epochs\":3") != std::string::npos);
    CHECK(header.find("\"seed\":9") != std::string::npos);

    const fs::path bad = dir.path / "bad.json";
    std::ofstream(bad) << R"({"learning_rate": 0.1})";
    CHECK(run("train --data " + data.string() + " --config " + bad.string() +
              " --out-model " + (dir.path / "m2.ckpt").string() + " --out-synth " +
              (dir.path / "s2.csv").string()) == 1);
}

TEST_CASE("cli prepare census fills unknowns") {
    TempDir dir;
    const fs::path raw = dir.path / "census.csv";
    {
        std::ofstream out(raw);
        out << "age,workclass\n";
        Rng rng(321);
        for (int i = 0; i < 60; ++i) {
            out << (18 + static_cast<int>(rng.below(50))) << ','
                << (i % 9 == 0 ? "?" : (rng.uniform01() < 0.6 ? "Private" : "Gov")) << '\n';
        }
    }
    const fs::path out_csv = dir.path / "census_prep.csv";
    const fs::path out_schema = dir.path / "census_schema.json";
    REQUIRE(run("prepare --input " + raw.string() + " --recipe census --output " +
                out_csv.string() + " --schema-out " + out_schema.string()) == 0);
    const DataTable prepared = load_csv(out_csv, load_schema(out_schema));
    CHECK_FALSE(prepared.has_missing());
    const int wc = prepared.schema().find("workclass");
    REQUIRE(wc >= 0);
    bool saw_unknown = false;
    for (std::size_t r = 0; r < prepared.row_count(); ++r) {
        saw_unknown = saw_unknown ||
                      prepared.category_name(wc, prepared.cat(r, wc)) == "Unknown";
    }
    CHECK(saw_unknown);
}

TEST_CASE("cli generate supports the sampling decode") {
    TempDir dir;
    const fs::path data = write_toy_csv(dir);
    REQUIRE(run("prepare --input " + data.string() + " --output " +
                (dir.path / "p.csv").string() + " --schema-out " +
                (dir.path / "toy_schema.json").string()) == 0);
    REQUIRE(run(toy_flags(dir, data, 5) + " --out-model " + (dir.path / "m.ckpt").string() +
                " --out-synth " + (dir.path / "s.csv").string()) == 0);
    const fs::path a = dir.path / "sa.csv";
    const fs::path b = dir.path / "sb.csv";
    REQUIRE(run("generate --model " + (dir.path / "m.ckpt").string() +
                " --count 30 --seed 2 --sample-decode --out " + a.string()) == 0);
    REQUIRE(run("generate --model " + (dir.path / "m.ckpt").string() +
                " --count 30 --seed 2 --sample-decode --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    const DataTable rows = load_csv(a, load_schema(dir.path / "toy_schema.json"));
    CHECK(rows.row_count() == 30);
}

TEST_CASE("cli help lists flags with defaults") {
    TempDir dir;
    for (const std::string sub : {"prepare", "train", "generate", "evaluate", "tune"}) {
        const fs::path out = dir.path / (sub + "_help.txt");
        CHECK(run(sub + " --help", out) == 0);
        const std::string text = slurp(out);
        CHECK(text.find("--") != std::string::npos);
    }
    const fs::path out = dir.path / "train_help.txt";
    run("train --help", out);
    const std::string text = slurp(out);
    CHECK(text.find("--seed") != std::string::npos);
    CHECK(text.find("--first-item") != std::string::npos);
    CHECK(text.find("0.2") != std::string::npos);  // default surfaced
}
