#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "tabgan/errors.hpp"

namespace tabgan {

// Dense row-major float64 matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

    std::string shape_str() const { return std::to_string(rows) + "x" + std::to_string(cols); }

    bool operator==(const Matrix& other) const = default;
};

inline void ensure_finite(const Matrix& m, const char* what) {
    for (double v : m.data) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string("non-finite value in ") + what);
        }
    }
}

namespace detail {

inline void matmul_rows(const Matrix& a, const Matrix& b, Matrix& out, std::size_t r0, std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
}

}  // namespace detail

// out = a * b. Row-partitioned across threads for large products; each output
// row is computed by exactly one thread in a fixed order, so results are
// bitwise identical to the serial path.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul: lhs " + a.shape_str() + " incompatible with rhs " + b.shape_str());
    }
    Matrix out(a.rows, b.cols, 0.0);
    const std::size_t work = a.rows * a.cols * b.cols;
    const unsigned hw = std::thread::hardware_concurrency();
    if (work >= (std::size_t{1} << 23) && hw > 1 && a.rows > 1) {
        const std::size_t n_threads = std::min<std::size_t>(hw, a.rows);
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        const std::size_t chunk = (a.rows + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t r0 = t * chunk;
            const std::size_t r1 = std::min(a.rows, r0 + chunk);
            if (r0 >= r1) break;
            pool.emplace_back(detail::matmul_rows, std::cref(a), std::cref(b), std::ref(out), r0, r1);
        }
        for (auto& th : pool) th.join();
    } else {
        detail::matmul_rows(a, b, out, 0, a.rows);
    }
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix out(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            out.at(j, i) = m.at(i, j);
        }
    }
    return out;
}

// Adds v to every row of m.
inline void add_row_vector(Matrix& m, const std::vector<double>& v) {
    if (v.size() != m.cols) {
        throw ShapeError("add_row_vector: vector size " + std::to_string(v.size()) + " vs matrix " +
                         m.shape_str());
    }
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) row[j] += v[j];
    }
}

// Column sums, i.e. reduction of each column over all rows.
inline std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j];
    }
    return out;
}

}  // namespace tabgan
