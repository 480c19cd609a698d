#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "madelab/vec.hpp"

namespace madelab {

// Deterministic random source. Gaussian draws go through an explicit
// Box-Muller instead of std::normal_distribution, whose stream is
// implementation-defined; the "same seed, same bits" contract has to hold.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec normal_vec(int dim, double sigma) {
        Vec v = vec0();
        for (int a = 0; a < dim; ++a) v[a] = sigma * normal();
        return v;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace madelab
