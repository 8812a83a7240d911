#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tabgan/checkpoint.hpp"
#include "tabgan/codec.hpp"
#include "tabgan/errors.hpp"
#include "tabgan/gan_config.hpp"
#include "tabgan/metrics.hpp"
#include "tabgan/nn.hpp"
#include "tabgan/rng.hpp"
#include "tabgan/schedule.hpp"
#include "tabgan/table.hpp"

namespace tabgan {

struct NetworkPair {
    MlpParams gen;
    MlpParams disc;
};

// Generator: noise_dim -> gen_hidden -> encoded_width.
// Discriminator: encoded_width -> disc_hidden -> 1.
// Weights ~ N(0, 0.02^2), biases zero; draw order is fixed so a seed pins
// every weight.
inline NetworkPair init_networks(const GanConfig& config, std::size_t encoded_width, Rng& rng) {
    config.validate();
    if (encoded_width < 1) throw ArgumentError("init_networks: encoded width must be >= 1");
    constexpr double kInitStd = 0.02;
    NetworkPair nets;
    nets.gen.w1 = rng.normal_matrix(config.noise_dim, config.gen_hidden, kInitStd);
    nets.gen.b1.assign(config.gen_hidden, 0.0);
    nets.gen.w2 = rng.normal_matrix(config.gen_hidden, encoded_width, kInitStd);
    nets.gen.b2.assign(encoded_width, 0.0);
    nets.gen.negative_slope = config.gen_slope;
    nets.disc.w1 = rng.normal_matrix(encoded_width, config.disc_hidden, kInitStd);
    nets.disc.b1.assign(config.disc_hidden, 0.0);
    nets.disc.w2 = rng.normal_matrix(config.disc_hidden, 1, kInitStd);
    nets.disc.b2.assign(1, 0.0);
    nets.disc.negative_slope = config.disc_slope;
    return nets;
}

namespace detail {

// Per-block output heads on the raw generator output: softmax over each
// categorical block; sigmoid on continuous entries whose normalizer maps into
// [0,1] (min_max, max_absolute), identity for standardization.
inline void apply_output_heads(Matrix& m, const BlockLayout& layout) {
    if (m.cols != layout.total_width) {
        throw ShapeError("apply_output_heads: matrix width " + std::to_string(m.cols) +
                         " vs layout width " + std::to_string(layout.total_width));
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* row = m.row(r);
        for (const Block& b : layout.blocks) {
            if (b.categorical) {
                double peak = row[b.offset];
                for (std::size_t k = 1; k < b.width; ++k) peak = std::max(peak, row[b.offset + k]);
                double total = 0.0;
                for (std::size_t k = 0; k < b.width; ++k) {
                    row[b.offset + k] = std::exp(row[b.offset + k] - peak);
                    total += row[b.offset + k];
                }
                for (std::size_t k = 0; k < b.width; ++k) row[b.offset + k] /= total;
            } else if (b.norm != NormMethod::standardization) {
                row[b.offset] = sigmoid(row[b.offset]);
            }
        }
    }
}

// Jacobian-vector product of the output heads: maps d(loss)/d(head output)
// back to d(loss)/d(pre-head output).
inline Matrix output_heads_backward(const Matrix& head_out, const Matrix& grad_out,
                                    const BlockLayout& layout) {
    Matrix grad_pre(grad_out.rows, grad_out.cols);
    for (std::size_t r = 0; r < grad_out.rows; ++r) {
        const double* out = head_out.row(r);
        const double* g = grad_out.row(r);
        double* gp = grad_pre.row(r);
        for (const Block& b : layout.blocks) {
            if (b.categorical) {
                double dot = 0.0;
                for (std::size_t k = 0; k < b.width; ++k) dot += g[b.offset + k] * out[b.offset + k];
                for (std::size_t k = 0; k < b.width; ++k) {
                    gp[b.offset + k] = out[b.offset + k] * (g[b.offset + k] - dot);
                }
            } else if (b.norm != NormMethod::standardization) {
                const double p = out[b.offset];
                gp[b.offset] = g[b.offset] * p * (1.0 - p);
            } else {
                gp[b.offset] = g[b.offset];
            }
        }
    }
    return grad_pre;
}

inline std::vector<double> sigmoid_of_column(const Matrix& output_pre) {
    std::vector<double> p(output_pre.rows);
    for (std::size_t i = 0; i < output_pre.rows; ++i) p[i] = sigmoid(output_pre.at(i, 0));
    return p;
}

}  // namespace detail

// Raw noise -> encoded-space samples (heads applied).
inline Matrix generator_forward(const MlpParams& gen, const Matrix& noise,
                                const BlockLayout& layout) {
    if (gen.out_dim() != layout.total_width) {
        throw ShapeError("generator_forward: generator emits " + std::to_string(gen.out_dim()) +
                         " columns, layout expects " + std::to_string(layout.total_width));
    }
    Matrix out = forward_mlp(gen, noise).output_pre;
    detail::apply_output_heads(out, layout);
    return out;
}

/// One discriminator update: equal real/fake batches, BCE targets 1/0,
/// a single Adam step on the discriminator only.
inline double discriminator_step(MlpParams& disc, AdamState& disc_state, const MlpParams& gen,
                                 const Matrix& real_batch, const BlockLayout& layout,
                                 std::size_t noise_dim, Rng& rng) {
    const std::size_t batch = real_batch.rows;
    if (batch == 0) throw ArgumentError("discriminator_step: empty real batch");

    const Matrix noise = rng.normal_matrix(batch, noise_dim);
    const Matrix fake = generator_forward(gen, noise, layout);

    const MlpForward fwd_real = forward_mlp(disc, real_batch);
    const MlpForward fwd_fake = forward_mlp(disc, fake);
    const std::vector<double> p_real = detail::sigmoid_of_column(fwd_real.output_pre);
    const std::vector<double> p_fake = detail::sigmoid_of_column(fwd_fake.output_pre);

    std::vector<double> predictions(p_real);
    predictions.insert(predictions.end(), p_fake.begin(), p_fake.end());
    std::vector<double> targets(batch, 1.0);
    targets.resize(2 * batch, 0.0);
    const double loss = bce_loss(predictions, targets);
    if (!std::isfinite(loss)) throw NumericError("discriminator_step: non-finite loss");

    // d(mean BCE)/d(pre-sigmoid) = (p - y) / n over the combined batch.
    const double inv_n = 1.0 / static_cast<double>(2 * batch);
    Matrix dz_real(batch, 1), dz_fake(batch, 1);
    for (std::size_t i = 0; i < batch; ++i) {
        dz_real.at(i, 0) = (p_real[i] - 1.0) * inv_n;
        dz_fake.at(i, 0) = p_fake[i] * inv_n;
    }
    MlpBackward back_real = backward_mlp(disc, fwd_real, dz_real);
    const MlpBackward back_fake = backward_mlp(disc, fwd_fake, dz_fake);
    back_real.grads.accumulate(back_fake.grads);
    adam_step(disc, back_real.grads, disc_state);
    return loss;
}

/// One generator update with the non-saturating objective: BCE of D(G(z))
/// against target 1, backpropagated through the frozen discriminator and the
/// output heads; a single Adam step on the generator only.
inline double generator_step(MlpParams& gen, AdamState& gen_state, const MlpParams& disc,
                             std::size_t batch_size, const BlockLayout& layout,
                             std::size_t noise_dim, Rng& rng) {
    if (batch_size == 0) throw ArgumentError("generator_step: batch_size must be >= 1");

    const Matrix noise = rng.normal_matrix(batch_size, noise_dim);
    const MlpForward fwd_gen = forward_mlp(gen, noise);
    Matrix fake = fwd_gen.output_pre;
    detail::apply_output_heads(fake, layout);

    const MlpForward fwd_disc = forward_mlp(disc, fake);
    const std::vector<double> p = detail::sigmoid_of_column(fwd_disc.output_pre);
    const std::vector<double> ones(batch_size, 1.0);
    const double loss = bce_loss(p, ones);
    if (!std::isfinite(loss)) throw NumericError("generator_step: non-finite loss");

    const double inv_n = 1.0 / static_cast<double>(batch_size);
    Matrix dz(batch_size, 1);
    for (std::size_t i = 0; i < batch_size; ++i) dz.at(i, 0) = (p[i] - 1.0) * inv_n;

    const MlpBackward through_disc = backward_mlp(disc, fwd_disc, dz);
    const Matrix grad_pre_head = detail::output_heads_backward(fake, through_disc.input_grad, layout);
    const MlpBackward back_gen = backward_mlp(gen, fwd_gen, grad_pre_head);
    adam_step(gen, back_gen.grads, gen_state);
    return loss;
}

struct EpochLogEntry {
    std::size_t epoch = 0;  // 1-based
    double disc_loss = 0.0;
    double gen_loss = 0.0;
    std::size_t quota = 0;
    std::size_t cumulative_quota = 0;
};

struct TrainResult {
    Checkpoint checkpoint;
    DataTable synthetic;
    std::vector<EpochLogEntry> log;
};

/// Adversarial training with in-loop generation: after each epoch's updates
/// the epoch's quota of synthetic rows is sampled, decoded and pooled.
/// Deterministic for a fixed (seed, config, schedule, table).
inline TrainResult train_with_generation(const DataTable& table, const GanConfig& config,
                                         const GenerationSchedule& schedule,
                                         const std::vector<NormMethod>& methods = {}) {
    config.validate();
    if (table.row_count() == 0) throw ArgumentError("train_with_generation: empty table");
    if (schedule.epochs != config.epochs || schedule.quotas.size() != config.epochs) {
        throw ScheduleError("train_with_generation: schedule covers " +
                            std::to_string(schedule.quotas.size()) + " epochs, config expects " +
                            std::to_string(config.epochs));
    }

    auto [encoded, codec_params] = encode_table(table, methods);
    const std::size_t width = encoded.layout.total_width;

    Rng rng(config.seed);
    NetworkPair nets = init_networks(config, width, rng);
    AdamState gen_state =
        AdamState::for_params(nets.gen, config.lr, config.beta1, config.beta2, config.epsilon);
    AdamState disc_state =
        AdamState::for_params(nets.disc, config.lr, config.beta1, config.beta2, config.epsilon);

    TrainResult result;
    result.synthetic = DataTable(table.schema(), 0);
    std::vector<std::size_t> order(table.row_count());
    std::iota(order.begin(), order.end(), 0);
    Matrix batch(config.batch_size, width);
    std::size_t cumulative = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        const std::size_t n_batches = table.row_count() / config.batch_size;  // drop the tail
        double disc_loss_sum = 0.0, gen_loss_sum = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            for (std::size_t i = 0; i < config.batch_size; ++i) {
                const double* src = encoded.data.row(order[b * config.batch_size + i]);
                std::copy(src, src + width, batch.row(i));
            }
            for (std::size_t k = 0; k < config.disc_steps_per_gen_step; ++k) {
                disc_loss_sum += discriminator_step(nets.disc, disc_state, nets.gen, batch,
                                                    encoded.layout, config.noise_dim, rng);
            }
            gen_loss_sum += generator_step(nets.gen, gen_state, nets.disc, config.batch_size,
                                           encoded.layout, config.noise_dim, rng);
        }

        const std::size_t quota = schedule.quotas[epoch];
        if (quota > 0) {
            const Matrix noise = rng.normal_matrix(quota, config.noise_dim);
            const Matrix raw = generator_forward(nets.gen, noise, encoded.layout);
            const DataTable rows =
                decode_matrix({encoded.layout, raw}, table.schema(), codec_params);
            result.synthetic.append_rows(rows);
        }
        cumulative += quota;

        EpochLogEntry entry;
        entry.epoch = epoch + 1;
        entry.disc_loss = n_batches
                              ? disc_loss_sum / static_cast<double>(n_batches *
                                                                    config.disc_steps_per_gen_step)
                              : 0.0;
        entry.gen_loss = n_batches ? gen_loss_sum / static_cast<double>(n_batches) : 0.0;
        entry.quota = quota;
        entry.cumulative_quota = cumulative;
        result.log.push_back(entry);
    }

    result.checkpoint.version = 1;
    result.checkpoint.config = config;
    result.checkpoint.schema = table.schema();
    result.checkpoint.codec = codec_params;
    result.checkpoint.gen = std::move(nets.gen);
    result.checkpoint.disc = std::move(nets.disc);
    result.checkpoint.rng_state = rng.state();
    return result;
}

// Fresh samples from a trained checkpoint, decoded with the stored codec.
inline DataTable sample_rows(const Checkpoint& c, std::size_t count, std::uint64_t seed) {
    const BlockLayout layout = make_layout(c.schema, c.codec);
    Rng rng(seed);
    const Matrix noise = rng.normal_matrix(count, c.config.noise_dim);
    const Matrix raw = generator_forward(c.gen, noise, layout);
    return decode_matrix({layout, raw}, c.schema, c.codec);
}

using FidelityEvaluator = std::function<double(const DataTable& real, const DataTable& synth)>;

struct TuneResult {
    std::vector<std::size_t> epoch_grid;
    std::vector<double> first_item_grid;
    std::vector<std::vector<double>> scores;  // epoch-major
    std::size_t best_epochs = 0;
    double best_first_item = 0.0;
    double best_score = 0.0;
};

/// Grid search over (epochs, first item) for the geometric schedule. Every
/// cell trains from scratch at 100% synthetic volume and is scored by
/// `evaluator` (default: overall fidelity score). Ties prefer the smaller
/// epoch count, then the smaller first item.
inline TuneResult tune_schedule(const DataTable& table, const GanConfig& config,
                                const std::vector<std::size_t>& epoch_grid,
                                const std::vector<double>& first_item_grid,
                                const FidelityEvaluator& evaluator = {}) {
    if (epoch_grid.empty() || first_item_grid.empty()) {
        throw ArgumentError("tune_schedule: grids must be non-empty");
    }
    const FidelityEvaluator score_fn =
        evaluator ? evaluator : [](const DataTable& real, const DataTable& synth) {
            return evaluate_all(real, synth).overall;
        };

    TuneResult result;
    result.epoch_grid = epoch_grid;
    result.first_item_grid = first_item_grid;
    bool have_best = false;
    for (const std::size_t epochs : epoch_grid) {
        std::vector<double> row;
        for (const double first_item : first_item_grid) {
            GanConfig cell_config = config;
            cell_config.epochs = epochs;
            const GenerationSchedule schedule = build_schedule(
                ScheduleMode::geometric, table.row_count(), epochs, first_item, 100.0);
            const TrainResult trained = train_with_generation(table, cell_config, schedule);
            const double score = score_fn(table, trained.synthetic);
            row.push_back(score);
            const bool better =
                !have_best || score > result.best_score ||
                (score == result.best_score &&
                 (epochs < result.best_epochs ||
                  (epochs == result.best_epochs && first_item < result.best_first_item)));
            if (better) {
                have_best = true;
                result.best_score = score;
                result.best_epochs = epochs;
                result.best_first_item = first_item;
            }
        }
        result.scores.push_back(std::move(row));
    }
    return result;
}

}  // namespace tabgan
