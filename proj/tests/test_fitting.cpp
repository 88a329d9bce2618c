#include "doctest.h"

#include <cmath>
#include <random>

#include "webattn/fitting.hpp"

using namespace webattn;

namespace {

std::vector<SeriesPoint> power_points(double c, double beta, int t_max) {
    std::vector<SeriesPoint> pts;
    for (int t = 1; t <= t_max; ++t)
        pts.push_back({static_cast<double>(t), c * std::pow(t, -beta)});
    return pts;
}

std::vector<SeriesPoint> stretched_points(double scale, double a, double b,
                                          int t_max) {
    std::vector<SeriesPoint> pts;
    for (int t = 1; t <= t_max; ++t)
        pts.push_back({static_cast<double>(t),
                       scale * std::exp(-a * std::pow(t, b))});
    return pts;
}

// Test-local Poisson sampler (Knuth), independent of the library RNG.
std::int64_t poisson_draw(double lambda, std::mt19937& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::int64_t k = 0;
    if (lambda < 30) {
        double l = std::exp(-lambda), p = 1.0;
        for (;;) {
            p *= u(gen);
            if (p <= l) return k;
            ++k;
        }
    }
    return poisson_draw(lambda / 2, gen) + poisson_draw(lambda / 2, gen);
}

}  // namespace

TEST_CASE("exact power law is recovered to machine precision") {
    auto pts = power_points(100.0, 1.5, 100);
    auto fit = fit_power_law_ls(pts);
    CHECK(fit.exponent_beta == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(fit.prefactor_C == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(fit.goodness_r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.fit_range.t_min == 1);
    CHECK(fit.fit_range.t_max == 100);
    CHECK(fit.n_points == 100);
}

TEST_CASE("constant series fits beta = 0") {
    std::vector<SeriesPoint> pts;
    for (int t = 1; t <= 20; ++t) pts.push_back({static_cast<double>(t), 7.0});
    auto fit = fit_power_law_ls(pts);
    CHECK(fit.exponent_beta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.goodness_r2 == doctest::Approx(1.0));
}

TEST_CASE("fit errors: too few points, all zeros") {
    std::vector<SeriesPoint> two{{1, 5}, {2, 3}};
    CHECK_THROWS_AS(fit_power_law_ls(two), FitError);
    CHECK_THROWS_AS(fit_power_law_poisson(two), FitError);
    std::vector<SeriesPoint> zeros{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
    CHECK_THROWS_AS(fit_power_law_ls(zeros), FitError);
    CHECK_THROWS_AS(fit_power_law_poisson(zeros), FitError);
    std::vector<SeriesPoint> three{{1, 8}, {2, 4}, {3, 2}};
    CHECK_THROWS_AS(fit_stretched_exp(three), FitError);  // needs >= 4
}

TEST_CASE("zero policy: drop removes bins, add_half keeps them") {
    std::vector<SeriesPoint> pts{{1, 100}, {2, 35}, {3, 0}, {4, 9}, {5, 0}, {6, 4}};
    FitOptions drop;
    auto f1 = fit_power_law_ls(pts, drop);
    CHECK(f1.n_points == 4);
    FitOptions half;
    half.zero_policy = ZeroPolicy::add_half;
    auto f2 = fit_power_law_ls(pts, half);
    CHECK(f2.n_points == 6);
    CHECK(f2.exponent_beta > f1.exponent_beta);  // half-counts steepen the tail
}

TEST_CASE("Monte Carlo oracle: count-weighted LS and Poisson ML recover beta") {
    std::mt19937 gen(4242);
    const int replicates = 200;
    double sum_ls = 0, sum_pois = 0;
    for (int rep = 0; rep < replicates; ++rep) {
        std::vector<SeriesPoint> pts;
        for (int t = 1; t <= 100; ++t) {
            double lambda = 500.0 * std::pow(t, -1.5);
            pts.push_back({static_cast<double>(t),
                           static_cast<double>(poisson_draw(lambda, gen))});
        }
        FitOptions weighted;
        weighted.weighting = Weighting::count;
        sum_ls += fit_power_law_ls(pts, weighted).exponent_beta;
        sum_pois += fit_power_law_poisson(pts).exponent_beta;
    }
    CHECK(sum_ls / replicates == doctest::Approx(1.5).epsilon(0.1 / 1.5));
    CHECK(sum_pois / replicates == doctest::Approx(1.5).epsilon(0.1 / 1.5));
}

TEST_CASE("Poisson fit against an independent grid-search oracle") {
    std::vector<SeriesPoint> pts;
    for (int t = 1; t <= 50; ++t)
        pts.push_back({static_cast<double>(t),
                       std::round(100.0 * std::pow(t, -1.0))});

    // coarse grid over (C, beta), maximizing the Poisson likelihood directly
    double best_ll = -1e300, best_beta = 0;
    for (double c = 60; c <= 140; c += 0.5) {
        for (double beta = 0.5; beta <= 1.5; beta += 0.005) {
            double ll = 0;
            for (const auto& p : pts) {
                double mu = c * std::pow(p.t, -beta);
                ll += p.n * std::log(mu) - mu;
            }
            if (ll > best_ll) {
                best_ll = ll;
                best_beta = beta;
            }
        }
    }

    auto fit = fit_power_law_poisson(pts);
    CHECK(fit.exponent_beta >= 0.95);
    CHECK(fit.exponent_beta <= 1.05);
    CHECK(std::abs(fit.exponent_beta - best_beta) <= 0.005);
    CHECK(fit.converged);
    CHECK(!fit.degenerate);
}

TEST_CASE("Poisson fit flags the degenerate single-spike series") {
    std::vector<SeriesPoint> pts{{1, 50}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
    auto fit = fit_power_law_poisson(pts);
    CHECK(fit.degenerate);
    CHECK(fit.exponent_beta == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("Poisson fit rejects fractional counts") {
    std::vector<SeriesPoint> pts{{1, 1.5}, {2, 1}, {3, 1}};
    CHECK_THROWS_AS(fit_power_law_poisson(pts), FitError);
}

TEST_CASE("exact stretched exponential recovers the decay-factor parameters") {
    auto pts = stretched_points(10.0, 0.4, 0.4, 100);
    auto fit = fit_stretched_exp(pts);
    CHECK(fit.stretch_a == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(fit.stretch_b == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(fit.prefactor_C == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(fit.goodness_r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pure exponential data drives b to the boundary") {
    auto pts = stretched_points(50.0, 0.3, 1.0, 60);
    auto fit = fit_stretched_exp(pts);
    CHECK(fit.stretch_b == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.stretch_a == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("stretched fit tracks power-law data almost as well") {
    auto pts = power_points(1.0, 1.5, 100);
    auto fit = fit_stretched_exp(pts);
    CHECK(fit.goodness_r2 >= 0.9);
}

TEST_CASE("compare_fits picks the generating model and reports residuals") {
    SUBCASE("power-law input") {
        auto cmp = compare_fits(power_points(100.0, 1.5, 100));
        CHECK(cmp.winner == FitModel::power_law);
        CHECK(cmp.power_law.goodness_r2 >= cmp.stretched_exp.goodness_r2);
        CHECK(std::abs(cmp.delta_r2) <= 0.1);
        CHECK(cmp.power_law.goodness_r2 >= 0.9);
        CHECK(cmp.stretched_exp.goodness_r2 >= 0.9);
        REQUIRE(cmp.t.size() == 100);
        for (double r : cmp.residual_power_law) CHECK(std::abs(r) < 1e-9);
    }
    SUBCASE("stretched input") {
        auto cmp = compare_fits(stretched_points(10.0, 0.4, 0.4, 100));
        CHECK(cmp.winner == FitModel::stretched_exp);
        for (double r : cmp.residual_stretched_exp) CHECK(std::abs(r) < 1e-6);
    }
}

TEST_CASE("scale equivariance: counts scaled by c scale only the prefactor") {
    const double scale = 37.25;
    auto pts = power_points(100.0, 1.5, 100);
    auto scaled = pts;
    for (auto& p : scaled) p.n *= scale;
    auto f0 = fit_power_law_ls(pts);
    auto f1 = fit_power_law_ls(scaled);
    CHECK(std::abs(f1.exponent_beta - f0.exponent_beta) <= 1e-9);
    CHECK(f1.prefactor_C / f0.prefactor_C == doctest::Approx(scale).epsilon(1e-9));

    auto spts = stretched_points(10.0, 0.4, 0.4, 100);
    auto sscaled = spts;
    for (auto& p : sscaled) p.n *= scale;
    auto s0 = fit_stretched_exp(spts);
    auto s1 = fit_stretched_exp(sscaled);
    CHECK(std::abs(s1.stretch_a - s0.stretch_a) <= 1e-9);
    CHECK(std::abs(s1.stretch_b - s0.stretch_b) <= 1e-9);
    CHECK(s1.prefactor_C / s0.prefactor_C == doctest::Approx(scale).epsilon(1e-9));
}

TEST_CASE("LS and Poisson agree on exact integral power-law data") {
    // t restricted to powers of two keeps C * t^-1 integral
    std::vector<SeriesPoint> pts;
    for (int t : {1, 2, 4, 8, 16, 32, 64})
        pts.push_back({static_cast<double>(t), 1048576.0 / t});
    auto ls = fit_power_law_ls(pts);
    auto pois = fit_power_law_poisson(pts);
    CHECK(std::abs(ls.exponent_beta - pois.exponent_beta) <= 1e-3);
    CHECK(ls.exponent_beta == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("restricting the range of exact data leaves beta unchanged") {
    auto pts = power_points(100.0, 1.5, 100);
    FitOptions narrow;
    narrow.range = FitRange{10, 50};
    auto fit = fit_power_law_ls(pts, narrow);
    CHECK(std::abs(fit.exponent_beta - 1.5) <= 1e-9);
    CHECK(fit.fit_range.t_min == 10);
    CHECK(fit.fit_range.t_max == 50);
    CHECK(fit.n_points == 41);
}

TEST_CASE("beta standard error shrinks with cleaner data") {
    std::mt19937 gen(5);
    std::vector<SeriesPoint> noisy;
    for (int t = 1; t <= 80; ++t) {
        double lambda = 300.0 * std::pow(t, -1.2);
        noisy.push_back({static_cast<double>(t),
                         static_cast<double>(poisson_draw(lambda, gen))});
    }
    auto noisy_fit = fit_power_law_ls(noisy);
    auto exact_fit = fit_power_law_ls(power_points(300.0, 1.2, 80));
    CHECK(noisy_fit.beta_stderr > 0);
    CHECK(exact_fit.beta_stderr < noisy_fit.beta_stderr);
    CHECK(exact_fit.beta_stderr <= 1e-9);
}
