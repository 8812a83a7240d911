// Command-line front end: prepare datasets, train/generate under a chosen
// schedule, evaluate fidelity, and run the schedule grid search.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabgan/charts.hpp"
#include "tabgan/checkpoint.hpp"
#include "tabgan/csv.hpp"
#include "tabgan/gan.hpp"
#include "tabgan/metrics.hpp"
#include "tabgan/prepare.hpp"
#include "tabgan/schedule.hpp"
#include "tabgan/table.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;

bool check_inputs(const std::vector<fs::path>& inputs) {
    for (const auto& p : inputs) {
        if (!fs::exists(p)) {
            std::cerr << "error: input file not found: " << p.string() << "\n";
            return false;
        }
    }
    return true;
}

// Runs `body`; on failure removes everything in `outputs` so a nonzero exit
// never leaves partial results behind.
int guarded(std::vector<fs::path>& outputs, const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const std::exception& e) {
        for (const auto& p : outputs) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

void write_json_report(const json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tabgan::IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw tabgan::IoError("write failed: " + path.string());
}

struct GanFlags {
    std::string config_path;
    tabgan::GanConfig defaults;
    CLI::Option* noise_dim = nullptr;
    CLI::Option* gen_hidden = nullptr;
    CLI::Option* disc_hidden = nullptr;
    CLI::Option* gen_slope = nullptr;
    CLI::Option* disc_slope = nullptr;
    CLI::Option* lr = nullptr;
    CLI::Option* batch_size = nullptr;
    CLI::Option* epochs = nullptr;
    CLI::Option* disc_steps = nullptr;
    CLI::Option* seed = nullptr;
    tabgan::GanConfig staged;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--config", config_path, "JSON file with training hyperparameters");
        staged = defaults;
        noise_dim = cmd.add_option("--noise-dim", staged.noise_dim, "Noise vector width")
                        ->capture_default_str();
        gen_hidden = cmd.add_option("--gen-hidden", staged.gen_hidden, "Generator hidden width")
                         ->capture_default_str();
        disc_hidden =
            cmd.add_option("--disc-hidden", staged.disc_hidden, "Discriminator hidden width")
                ->capture_default_str();
        gen_slope = cmd.add_option("--gen-slope", staged.gen_slope, "Generator leaky ReLU slope")
                        ->capture_default_str();
        disc_slope =
            cmd.add_option("--disc-slope", staged.disc_slope, "Discriminator leaky ReLU slope")
                ->capture_default_str();
        lr = cmd.add_option("--lr", staged.lr, "Adam learning rate")->capture_default_str();
        batch_size = cmd.add_option("--batch-size", staged.batch_size, "Minibatch size")
                         ->capture_default_str();
        epochs = cmd.add_option("--epochs", staged.epochs, "Training epochs")->capture_default_str();
        disc_steps = cmd.add_option("--disc-steps", staged.disc_steps_per_gen_step,
                                    "Discriminator steps per generator step")
                         ->capture_default_str();
        seed = cmd.add_option("--seed", staged.seed, "RNG seed")->capture_default_str();
    }

    // Precedence: CLI flag > config file > default.
    tabgan::GanConfig resolve() const {
        tabgan::GanConfig cfg = defaults;
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) throw tabgan::IoError("cannot open " + config_path);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw tabgan::ConfigError(config_path + ": " + e.what());
            }
            cfg = tabgan::gan_config_from_json(j, cfg);
        }
        if (noise_dim->count()) cfg.noise_dim = staged.noise_dim;
        if (gen_hidden->count()) cfg.gen_hidden = staged.gen_hidden;
        if (disc_hidden->count()) cfg.disc_hidden = staged.disc_hidden;
        if (gen_slope->count()) cfg.gen_slope = staged.gen_slope;
        if (disc_slope->count()) cfg.disc_slope = staged.disc_slope;
        if (lr->count()) cfg.lr = staged.lr;
        if (batch_size->count()) cfg.batch_size = staged.batch_size;
        if (epochs->count()) cfg.epochs = staged.epochs;
        if (disc_steps->count()) cfg.disc_steps_per_gen_step = staged.disc_steps_per_gen_step;
        if (seed->count()) cfg.seed = staged.seed;
        cfg.validate();
        return cfg;
    }
};

tabgan::DataTable load_with_optional_schema(const fs::path& csv, const std::string& schema_path) {
    tabgan::LoadOptions opts;
    if (!schema_path.empty()) opts.schema = tabgan::load_schema(schema_path);
    return tabgan::load_csv(csv, opts);
}

std::vector<tabgan::NormMethod> methods_for(const tabgan::TableSchema& schema,
                                            const std::string& norm) {
    return std::vector<tabgan::NormMethod>(schema.size(), tabgan::norm_method_from_string(norm));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular GAN with in-training generation scheduling"};
    app.require_subcommand(1);

    // ---------------- prepare ----------------
    auto* prepare = app.add_subcommand("prepare", "Load and clean a raw CSV dataset");
    std::string prep_input, prep_output, prep_schema_out;
    std::string prep_recipe = "generic";
    prepare->add_option("--input", prep_input, "Raw CSV file")->required();
    prepare->add_option("--recipe", prep_recipe, "Preparation recipe: olympic, census or generic")
        ->check(CLI::IsMember({"olympic", "census", "generic"}))
        ->capture_default_str();
    prepare->add_option("--output", prep_output, "Prepared CSV path")->required();
    prepare->add_option("--schema-out", prep_schema_out, "Schema sidecar JSON path")->required();

    // ---------------- train ----------------
    auto* train = app.add_subcommand("train", "Train the GAN and pool scheduled synthetic rows");
    std::string train_data, train_schema, train_model, train_synth, train_log;
    std::string train_schedule = "geometric";
    std::string train_norm = "min_max";
    double train_first_item = 0.2, train_total = 100.0, train_ratio_override = 0.0;
    std::int64_t train_count = -1;
    GanFlags train_gan;
    train->add_option("--data", train_data, "Prepared CSV file")->required();
    train->add_option("--schema", train_schema, "Schema sidecar JSON (inferred when omitted)");
    train->add_option("--schedule", train_schedule,
                      "Generation schedule: all_at_end, uniform or geometric")
        ->check(CLI::IsMember({"all_at_end", "uniform", "geometric"}))
        ->capture_default_str();
    train->add_option("--first-item", train_first_item,
                      "First generation percentage of the geometric schedule")
        ->capture_default_str();
    train->add_option("--total", train_total, "Total generation percentage across all epochs")
        ->capture_default_str();
    train->add_option("--ratio-override", train_ratio_override,
                      "Force this common ratio instead of solving for it; quotas are rescaled "
                      "so they still sum to the synthetic count")
        ->capture_default_str();
    train->add_option("--synthetic-count", train_count,
                      "Synthetic rows to emit (default: one per real row)");
    train->add_option("--norm", train_norm,
                      "Normalization for continuous columns: min_max, max_absolute or "
                      "standardization")
        ->check(CLI::IsMember({"min_max", "max_absolute", "standardization"}))
        ->capture_default_str();
    train->add_option("--out-model", train_model, "Checkpoint output path")->required();
    train->add_option("--out-synth", train_synth, "Synthetic CSV output path")->required();
    train->add_option("--log", train_log, "Epoch log output path (JSON lines)");
    train_gan.add_to(*train);

    // ---------------- generate ----------------
    auto* generate = app.add_subcommand("generate", "Sample rows from a trained checkpoint");
    std::string gen_model, gen_out;
    std::size_t gen_count = 0;
    std::uint64_t gen_seed = 1;
    bool gen_sample_decode = false;
    generate->add_option("--model", gen_model, "Checkpoint file")->required();
    generate->add_option("--count", gen_count, "Rows to sample")->required();
    generate->add_option("--out", gen_out, "Output CSV path")->required();
    generate->add_option("--seed", gen_seed, "Sampling RNG seed")->capture_default_str();
    generate->add_flag("--sample-decode", gen_sample_decode,
                       "Sample categorical cells from block weights instead of argmax");

    // ---------------- evaluate ----------------
    auto* evaluate = app.add_subcommand("evaluate", "Score synthetic data against the real table");
    std::string eval_real, eval_synth, eval_schema, eval_report, eval_charts;
    std::size_t eval_small_threshold = 15, eval_bins = 10, eval_chart_bins = 20;
    evaluate->add_option("--real", eval_real, "Real CSV file")->required();
    evaluate->add_option("--synth", eval_synth, "Synthetic CSV file")->required();
    evaluate->add_option("--schema", eval_schema, "Schema sidecar JSON for both tables")->required();
    evaluate->add_option("--report", eval_report, "Fidelity report JSON output path")->required();
    evaluate->add_option("--charts", eval_charts, "Directory for per-column chart data and SVGs");
    evaluate->add_option("--small-threshold", eval_small_threshold,
                         "Max categories for a column to count as small (type B)")
        ->capture_default_str();
    evaluate->add_option("--bins", eval_bins, "Discretization bins for mixed-type pair scores")
        ->capture_default_str();
    evaluate->add_option("--chart-bins", eval_chart_bins,
                         "Histogram bins for continuous chart data")
        ->capture_default_str();

    // ---------------- tune ----------------
    auto* tune = app.add_subcommand("tune", "Grid-search geometric schedule parameters");
    std::string tune_data, tune_schema, tune_report;
    std::vector<std::size_t> tune_epoch_grid;
    std::vector<double> tune_first_grid;
    std::size_t tune_small_threshold = 15;
    GanFlags tune_gan;
    tune->add_option("--data", tune_data, "Prepared CSV file")->required();
    tune->add_option("--schema", tune_schema, "Schema sidecar JSON (inferred when omitted)");
    tune->add_option("--epoch-grid", tune_epoch_grid, "Epoch counts to try")
        ->required()
        ->delimiter(',');
    tune->add_option("--first-item-grid", tune_first_grid, "First-item percentages to try")
        ->required()
        ->delimiter(',');
    tune->add_option("--report", tune_report, "Grid report JSON output path")->required();
    tune->add_option("--small-threshold", tune_small_threshold,
                     "Max categories for a column to count as small (type B)")
        ->capture_default_str();
    tune_gan.add_to(*tune);

    CLI11_PARSE(app, argc, argv);

    if (prepare->parsed()) {
        if (!check_inputs({prep_input})) return kExitMissingInput;
        std::vector<fs::path> outputs;
        return guarded(outputs, [&] {
            tabgan::DataTable table = tabgan::load_csv(prep_input);
            if (prep_recipe == "olympic") {
                table = tabgan::prepare_olympic(table);
            } else if (prep_recipe == "census") {
                table = tabgan::prepare_census(table);
            }
            outputs.emplace_back(prep_output);
            tabgan::save_csv(table, prep_output);
            outputs.emplace_back(prep_schema_out);
            tabgan::save_schema(table.schema(), prep_schema_out);
            std::cout << table.row_count() << " rows, " << table.col_count() << " columns\n";
        });
    }

    if (train->parsed()) {
        std::vector<fs::path> required = {train_data};
        if (!train_schema.empty()) required.emplace_back(train_schema);
        if (!train_gan.config_path.empty()) required.emplace_back(train_gan.config_path);
        if (!check_inputs(required)) return kExitMissingInput;
        std::vector<fs::path> outputs;
        return guarded(outputs, [&] {
            const tabgan::DataTable table = load_with_optional_schema(train_data, train_schema);
            const tabgan::GanConfig cfg = train_gan.resolve();
            const std::size_t n_target =
                train_count < 0 ? table.row_count() : static_cast<std::size_t>(train_count);
            const tabgan::GenerationSchedule schedule = tabgan::build_schedule(
                tabgan::schedule_mode_from_string(train_schedule), n_target, cfg.epochs,
                train_first_item, train_total, train_ratio_override);
            const tabgan::TrainResult result = tabgan::train_with_generation(
                table, cfg, schedule, methods_for(table.schema(), train_norm));

            outputs.emplace_back(train_model);
            tabgan::save_checkpoint(result.checkpoint, train_model);
            outputs.emplace_back(train_synth);
            tabgan::save_csv(result.synthetic, train_synth);
            if (!train_log.empty()) {
                outputs.emplace_back(train_log);
                std::ofstream log(train_log, std::ios::binary);
                if (!log) throw tabgan::IoError("cannot write " + train_log);
                for (const auto& e : result.log) {
                    log << json{{"epoch", e.epoch},
                                {"disc_loss", e.disc_loss},
                                {"gen_loss", e.gen_loss},
                                {"quota", e.quota},
                                {"cumulative_quota", e.cumulative_quota}}
                               .dump()
                        << '\n';
                }
                if (!log) throw tabgan::IoError("write failed: " + train_log);
            }
            std::cout << "trained " << cfg.epochs << " epochs; synthetic rows: "
                      << result.synthetic.row_count() << "\n";
        });
    }

    if (generate->parsed()) {
        if (!check_inputs({gen_model})) return kExitMissingInput;
        std::vector<fs::path> outputs;
        return guarded(outputs, [&] {
            const tabgan::Checkpoint ckpt = tabgan::load_checkpoint(gen_model);
            tabgan::DataTable rows(ckpt.schema, 0);
            if (gen_sample_decode) {
                const tabgan::BlockLayout layout = tabgan::make_layout(ckpt.schema, ckpt.codec);
                tabgan::Rng rng(gen_seed);
                const tabgan::Matrix noise = rng.normal_matrix(gen_count, ckpt.config.noise_dim);
                const tabgan::Matrix raw = tabgan::generator_forward(ckpt.gen, noise, layout);
                rows = tabgan::decode_matrix_sampled({layout, raw}, ckpt.schema, ckpt.codec, rng);
            } else {
                rows = tabgan::sample_rows(ckpt, gen_count, gen_seed);
            }
            outputs.emplace_back(gen_out);
            tabgan::save_csv(rows, gen_out);
            std::cout << rows.row_count() << " rows written\n";
        });
    }

    if (evaluate->parsed()) {
        if (!check_inputs({eval_real, eval_synth, eval_schema})) return kExitMissingInput;
        std::vector<fs::path> outputs;
        return guarded(outputs, [&] {
            const tabgan::TableSchema schema = tabgan::load_schema(eval_schema);
            const tabgan::DataTable real = tabgan::load_csv(eval_real, schema);
            const tabgan::DataTable synth = tabgan::load_csv(eval_synth, schema);
            const tabgan::FidelityReport report =
                tabgan::evaluate_all(real, synth, eval_small_threshold, eval_bins);

            json j = report.to_json();
            j["config"] = {{"real", eval_real},
                           {"synth", eval_synth},
                           {"schema", eval_schema},
                           {"small_threshold", eval_small_threshold},
                           {"bins", eval_bins},
                           {"chart_bins", eval_chart_bins},
                           {"charts", eval_charts}};
            outputs.emplace_back(eval_report);
            write_json_report(j, eval_report);
            if (!eval_charts.empty()) {
                tabgan::charts::write_all_charts(real, synth, report, eval_charts, outputs,
                                                 eval_chart_bins);
            }
            std::cout << "overall " << report.overall << " (shape " << report.avg_shape
                      << ", pair trend " << report.avg_pair << ")\n";
        });
    }

    if (tune->parsed()) {
        std::vector<fs::path> required = {tune_data};
        if (!tune_schema.empty()) required.emplace_back(tune_schema);
        if (!tune_gan.config_path.empty()) required.emplace_back(tune_gan.config_path);
        if (!check_inputs(required)) return kExitMissingInput;
        std::vector<fs::path> outputs;
        return guarded(outputs, [&] {
            const tabgan::DataTable table = load_with_optional_schema(tune_data, tune_schema);
            const tabgan::GanConfig cfg = tune_gan.resolve();
            const auto evaluator = [&](const tabgan::DataTable& real,
                                       const tabgan::DataTable& synth) {
                return tabgan::evaluate_all(real, synth, tune_small_threshold).overall;
            };
            const tabgan::TuneResult result =
                tabgan::tune_schedule(table, cfg, tune_epoch_grid, tune_first_grid, evaluator);

            json j{{"config", tabgan::gan_config_to_json(cfg)},
                   {"epoch_grid", result.epoch_grid},
                   {"first_item_grid", result.first_item_grid},
                   {"scores", result.scores},
                   {"best",
                    {{"epochs", result.best_epochs},
                     {"first_item", result.best_first_item},
                     {"score", result.best_score}}}};
            outputs.emplace_back(tune_report);
            write_json_report(j, tune_report);
            std::cout << "best: epochs " << result.best_epochs << ", first item "
                      << result.best_first_item << ", score " << result.best_score << "\n";
        });
    }

    return kExitOk;
}
