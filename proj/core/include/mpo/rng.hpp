#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mpo/tensor.hpp"

namespace mpo {

/// Deterministic random source. Uniform and normal variates are derived
/// from the raw mt19937_64 stream with fixed arithmetic (no reliance on
/// distribution implementations), so sequences are reproducible across
/// standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform index in [0, n).
    std::int64_t index(std::int64_t n) {
        return static_cast<std::int64_t>(
            (static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(index(static_cast<std::int64_t>(i)))]);
        }
    }

    Tensor uniform_tensor(Shape shape, double lo, double hi) {
        Tensor t(std::move(shape));
        for (auto& v : t.data()) v = uniform(lo, hi);
        return t;
    }

    Tensor normal_tensor(Shape shape, double stddev = 1.0) {
        Tensor t(std::move(shape));
        for (auto& v : t.data()) v = stddev * normal();
        return t;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mpo
