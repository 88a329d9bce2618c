#pragma once

#include <cstdint>
#include <random>

namespace webattn {

// Sampling kernels on top of mt19937_64. std::*_distribution output is
// implementation-defined, so these are fixed algorithms: identical seeds
// give identical streams on every toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    std::int64_t binomial(std::int64_t n, double p);

    // Geometric on {0, 1, ...} with the given mean.
    std::int64_t geometric(double mean);

private:
    std::int64_t binomial_inversion(std::int64_t n, double p);
    std::int64_t binomial_btrs(std::int64_t n, double p);

    std::mt19937_64 gen_;
};

}  // namespace webattn
