#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tabgan/errors.hpp"
#include "tabgan/matrix.hpp"

namespace tabgan {

inline double leaky_relu(double x, double negative_slope) {
    return x >= 0.0 ? x : negative_slope * x;
}

// Overflow-safe logistic function; saturates to exactly 0/1 far in the tails.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Two-layer fully-connected net: in -> hidden (leaky ReLU) -> out.
// The output head (sigmoid, softmax, ...) is applied by the caller.
struct MlpParams {
    Matrix w1;               // in_dim x hidden_dim
    std::vector<double> b1;  // hidden_dim
    Matrix w2;               // hidden_dim x out_dim
    std::vector<double> b2;  // out_dim
    double negative_slope = 0.1;

    std::size_t in_dim() const { return w1.rows; }
    std::size_t hidden_dim() const { return w1.cols; }
    std::size_t out_dim() const { return w2.cols; }

    void validate() const {
        if (negative_slope <= 0.0 || negative_slope > 1.0) {
            throw ArgumentError("MlpParams: negative_slope must be in (0, 1]");
        }
        if (b1.size() != w1.cols || w2.rows != w1.cols || b2.size() != w2.cols) {
            throw ShapeError("MlpParams: inconsistent dimensions w1=" + w1.shape_str() + " b1=" +
                             std::to_string(b1.size()) + " w2=" + w2.shape_str() + " b2=" +
                             std::to_string(b2.size()));
        }
    }
};

// Forward activations, kept for the backward pass.
struct MlpForward {
    Matrix input;
    Matrix hidden_pre;   // input*w1 + b1
    Matrix hidden_post;  // leaky_relu(hidden_pre)
    Matrix output_pre;   // hidden_post*w2 + b2
};

inline MlpForward forward_mlp(const MlpParams& params, const Matrix& input) {
    params.validate();
    if (input.cols != params.in_dim()) {
        throw ShapeError("forward_mlp: input width " + std::to_string(input.cols) +
                         " does not match in_dim " + std::to_string(params.in_dim()));
    }
    MlpForward f;
    f.input = input;
    f.hidden_pre = matmul(input, params.w1);
    add_row_vector(f.hidden_pre, params.b1);
    f.hidden_post = f.hidden_pre;
    for (double& x : f.hidden_post.data) x = leaky_relu(x, params.negative_slope);
    f.output_pre = matmul(f.hidden_post, params.w2);
    add_row_vector(f.output_pre, params.b2);
    ensure_finite(f.output_pre, "forward_mlp output");
    return f;
}

// Mean binary cross-entropy. Predictions are clamped to [eps, 1-eps],
// eps = 1e-12, before the logs.
inline double bce_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty() || targets.empty()) {
        throw ArgumentError("bce_loss: empty input");
    }
    if (predictions.size() != targets.size()) {
        throw ArgumentError("bce_loss: length mismatch " + std::to_string(predictions.size()) +
                            " vs " + std::to_string(targets.size()));
    }
    constexpr double eps = 1e-12;
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double p = std::min(1.0 - eps, std::max(eps, predictions[i]));
        const double y = targets[i];
        sum -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return sum / static_cast<double>(predictions.size());
}

// Parameter-shaped tensor bundle; used for gradients and Adam moments.
struct MlpGrads {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;

    static MlpGrads zeros_like(const MlpParams& p) {
        MlpGrads g;
        g.w1 = Matrix(p.w1.rows, p.w1.cols);
        g.b1.assign(p.b1.size(), 0.0);
        g.w2 = Matrix(p.w2.rows, p.w2.cols);
        g.b2.assign(p.b2.size(), 0.0);
        return g;
    }

    void accumulate(const MlpGrads& other) {
        for (std::size_t i = 0; i < w1.data.size(); ++i) w1.data[i] += other.w1.data[i];
        for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += other.b1[i];
        for (std::size_t i = 0; i < w2.data.size(); ++i) w2.data[i] += other.w2.data[i];
        for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += other.b2[i];
    }
};

struct MlpBackward {
    MlpGrads grads;
    Matrix input_grad;  // dL/dinput, for chaining through a downstream net
};

// Backpropagation for the two-layer net. The leaky ReLU derivative at a
// pre-activation of exactly 0 is taken as 1 (positive-branch convention).
inline MlpBackward backward_mlp(const MlpParams& params, const MlpForward& cache,
                                const Matrix& output_grad) {
    if (output_grad.cols != params.out_dim() || output_grad.rows != cache.input.rows) {
        throw ShapeError("backward_mlp: output_grad " + output_grad.shape_str() +
                         " does not match batch " + std::to_string(cache.input.rows) + "x" +
                         std::to_string(params.out_dim()));
    }
    MlpBackward b;
    b.grads.w2 = matmul(transpose(cache.hidden_post), output_grad);
    b.grads.b2 = column_sums(output_grad);

    Matrix hidden_grad = matmul(output_grad, transpose(params.w2));
    for (std::size_t i = 0; i < hidden_grad.data.size(); ++i) {
        if (cache.hidden_pre.data[i] < 0.0) hidden_grad.data[i] *= params.negative_slope;
    }

    b.grads.w1 = matmul(transpose(cache.input), hidden_grad);
    b.grads.b1 = column_sums(hidden_grad);
    b.input_grad = matmul(hidden_grad, transpose(params.w1));
    ensure_finite(b.input_grad, "backward_mlp input_grad");
    ensure_finite(b.grads.w1, "backward_mlp w1 grad");
    ensure_finite(b.grads.w2, "backward_mlp w2 grad");
    return b;
}

struct AdamState {
    MlpGrads m;
    MlpGrads v;
    std::int64_t t = 0;
    double lr = 0.0001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_params(const MlpParams& p, double lr = 0.0001, double beta1 = 0.9,
                                double beta2 = 0.999, double epsilon = 1e-8) {
        if (lr <= 0.0) throw ArgumentError("AdamState: lr must be positive");
        AdamState s;
        s.m = MlpGrads::zeros_like(p);
        s.v = MlpGrads::zeros_like(p);
        s.lr = lr;
        s.beta1 = beta1;
        s.beta2 = beta2;
        s.epsilon = epsilon;
        return s;
    }
};

namespace detail {

inline void adam_update_span(std::span<double> theta, std::span<const double> g,
                             std::span<double> m, std::span<double> v, const AdamState& s,
                             double bias1, double bias2) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        theta[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
}

}  // namespace detail

// One Adam update with bias correction.
inline void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state) {
    if (!grads.w1.same_shape(params.w1) || !grads.w2.same_shape(params.w2) ||
        grads.b1.size() != params.b1.size() || grads.b2.size() != params.b2.size()) {
        throw ShapeError("adam_step: gradient shapes do not match parameters");
    }
    state.t += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    detail::adam_update_span(params.w1.data, grads.w1.data, state.m.w1.data, state.v.w1.data,
                             state, bias1, bias2);
    detail::adam_update_span(params.b1, grads.b1, state.m.b1, state.v.b1, state, bias1, bias2);
    detail::adam_update_span(params.w2.data, grads.w2.data, state.m.w2.data, state.v.w2.data,
                             state, bias1, bias2);
    detail::adam_update_span(params.b2, grads.b2, state.m.b2, state.v.b2, state, bias1, bias2);
    ensure_finite(params.w1, "adam_step w1");
    ensure_finite(params.w2, "adam_step w2");
}

struct GradCheckResult {
    bool pass = false;
    double worst_rel_err = 0.0;
};

/// Central-difference check of `analytic` against `loss` evaluated at
/// `params`. Every entry of every parameter tensor is perturbed by +-h and
/// the relative error |a-n| / max(1e-12, |a|+|n|) is compared to `tolerance`.
inline GradCheckResult gradient_check(const MlpParams& params,
                                      const std::function<double(const MlpParams&)>& loss,
                                      const MlpGrads& analytic, double tolerance,
                                      double h = 1e-5) {
    if (tolerance <= 0.0) throw ArgumentError("gradient_check: tolerance must be positive");
    MlpParams work = params;
    GradCheckResult result;
    result.pass = true;

    auto check_span = [&](std::span<double> theta, std::span<const double> a) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + h;
            const double up = loss(work);
            theta[i] = saved - h;
            const double down = loss(work);
            theta[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("gradient_check: non-finite loss");
            }
            const double numeric = (up - down) / (2.0 * h);
            const double rel =
                std::abs(a[i] - numeric) / std::max(1e-12, std::abs(a[i]) + std::abs(numeric));
            if (rel > result.worst_rel_err) result.worst_rel_err = rel;
            if (rel > tolerance) result.pass = false;
        }
    };

    check_span(work.w1.data, analytic.w1.data);
    check_span(work.b1, analytic.b1);
    check_span(work.w2.data, analytic.w2.data);
    check_span(work.b2, analytic.b2);
    return result;
}

}  // namespace tabgan
