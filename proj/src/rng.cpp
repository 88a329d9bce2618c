#include "webattn/rng.hpp"

#include <cmath>

namespace webattn {

namespace {

// Stirling tail ln(k!) - [0.5*ln(2*pi*(k+1)) + (k+1)*ln(k+1) - (k+1)],
// exact table for k < 10, series beyond.
double stirling_tail(double k) {
    static const double table[] = {
        0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
        0.02079067210376509, 0.0166446911898211,  0.0138761288230707,
        0.0118967099458917,  0.0104112652619720,  0.00925546218271273,
        0.00833056343336287};
    if (k < 10) return table[static_cast<int>(k)];
    const double kp1 = k + 1;
    const double kp1sq = kp1 * kp1;
    return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / kp1;
}

}  // namespace

std::int64_t Rng::binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    if (static_cast<double>(n) * p < 10.0) return binomial_inversion(n, p);
    return binomial_btrs(n, p);
}

std::int64_t Rng::binomial_inversion(std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    double f = std::exp(static_cast<double>(n) * std::log1p(-p));  // (1-p)^n
    double cdf = f;
    const double u = uniform();
    std::int64_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cdf += f;
        if (f <= 0.0) break;
    }
    return k;
}

// Hormann's BTRS transformed-rejection sampler, valid for n*p >= 10 and
// p <= 0.5; the same scheme numpy and TF use.
std::int64_t Rng::binomial_btrs(std::int64_t n, double p) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double r = p / q;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor((nd + 1) * p);

    for (;;) {
        const double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2 * a / us + b) * u + c);
        if (kd < 0 || kd > nd) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kd);

        v = std::log(v * alpha / (a / (us * us) + b));
        const double upper =
            (m + 0.5) * std::log((m + 1) / (r * (nd - m + 1))) +
            (nd + 1) * std::log((nd - m + 1) / (nd - kd + 1)) +
            (kd + 0.5) * std::log(r * (nd - kd + 1) / (kd + 1)) +
            stirling_tail(m) + stirling_tail(nd - m) - stirling_tail(kd) -
            stirling_tail(nd - kd);
        if (v <= upper) return static_cast<std::int64_t>(kd);
    }
}

std::int64_t Rng::geometric(double mean) {
    if (mean <= 0.0) return 0;
    const double p = 1.0 / (1.0 + mean);
    const double u = uniform();
    return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

}  // namespace webattn
