#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tabgan/errors.hpp"
#include "tabgan/matrix.hpp"

namespace tabgan {

// Deterministic random source. The engine is std::mt19937_64 (its output
// sequence is fully specified by the standard); all distributions are derived
// here by hand so that a given seed produces the same draws on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // N(0,1) via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Uniform integer in [0, n), bias-free.
    std::size_t below(std::size_t n) {
        if (n == 0) throw ArgumentError("Rng::below: n must be positive");
        const std::uint64_t range = n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - range + 1;
        for (;;) {
            const std::uint64_t x = next_u64();
            const std::uint64_t r = x % range;
            if (x - r <= limit) return r;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev = 1.0) {
        Matrix m(rows, cols);
        for (double& x : m.data) x = stddev * normal();
        return m;
    }

    // Textual state descriptor; restore() on the same string resumes the
    // exact draw sequence.
    std::string state() const {
        std::ostringstream os;
        os << engine_;
        os << "|" << (has_spare_ ? 1 : 0) << "|" << std::bit_cast<std::uint64_t>(spare_);
        return os.str();
    }

    void restore(const std::string& descriptor) {
        const auto p1 = descriptor.rfind('|');
        const auto p0 = descriptor.rfind('|', p1 == std::string::npos ? p1 : p1 - 1);
        if (p0 == std::string::npos || p1 == std::string::npos || p0 >= p1) {
            throw FormatError("Rng::restore: malformed state descriptor");
        }
        std::istringstream is(descriptor.substr(0, p0));
        is >> engine_;
        if (!is) throw FormatError("Rng::restore: bad engine state");
        has_spare_ = descriptor.substr(p0 + 1, p1 - p0 - 1) == "1";
        spare_ = std::bit_cast<double>(std::stoull(descriptor.substr(p1 + 1)));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tabgan
