#include "webattn/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace webattn {

namespace {

constexpr double kPoissonBetaLo = -5.0;
constexpr double kPoissonBetaHi = 10.0;
constexpr double kStretchBMin = 0.05;  // below this the form degenerates into a power law
constexpr double kStretchBMax = 1.0;

std::vector<SeriesPoint> apply_range(std::span<const SeriesPoint> pts,
                                     const FitOptions& opts) {
    std::vector<SeriesPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (opts.range) {
            if (p.t < opts.range->t_min || p.t > opts.range->t_max) continue;
        }
        if (p.n < 0) throw FitError("negative count at t=" + std::to_string(p.t));
        out.push_back(p);
    }
    return out;
}

// Points usable in log space after the zero policy.
std::vector<SeriesPoint> log_usable(std::span<const SeriesPoint> pts,
                                    const FitOptions& opts) {
    std::vector<SeriesPoint> ranged = apply_range(pts, opts);
    std::vector<SeriesPoint> out;
    out.reserve(ranged.size());
    bool any_positive = false;
    for (auto p : ranged) {
        if (p.n > 0) any_positive = true;
        if (p.n == 0) {
            if (opts.zero_policy == ZeroPolicy::drop) continue;
            p.n = 0.5;
        }
        out.push_back(p);
    }
    if (!any_positive) throw FitError("all-zero series");
    return out;
}

double weight_of(const SeriesPoint& p, Weighting w) {
    return w == Weighting::uniform ? 1.0 : p.n;
}

FitRange used_range(const std::vector<SeriesPoint>& pts) {
    double lo = pts.front().t, hi = pts.front().t;
    for (const auto& p : pts) {
        lo = std::min(lo, p.t);
        hi = std::max(hi, p.t);
    }
    return FitRange{static_cast<int>(std::llround(lo)),
                    static_cast<int>(std::llround(hi))};
}

struct LinFit {
    double slope, intercept, ss_res, ss_tot, y_scale, slope_stderr;
};

// Weighted simple linear regression of y on x.
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& w) {
    const std::size_t m = x.size();
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw, ybar = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx <= 0) throw FitError("degenerate fit: single distinct t value");
    LinFit f{};
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    f.ss_res = 0;
    f.ss_tot = 0;
    f.y_scale = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.ss_res += w[i] * r * r;
        f.ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
        f.y_scale += w[i] * y[i] * y[i];
    }
    const double dof = static_cast<double>(m) - 2.0;
    f.slope_stderr = dof > 0 ? std::sqrt(std::max(0.0, f.ss_res / dof) / sxx) : 0.0;
    return f;
}

// scale is a magnitude reference (sum w*y^2); an ss_tot at rounding-noise
// level below it means the data were constant and the fit is exact.
double r2_of(double ss_res, double ss_tot, double scale) {
    if (ss_tot <= 1e-15 * (scale + 1e-300))
        return ss_res <= ss_tot + 1e-300 ? 1.0 : 0.0;
    return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

// Log-space r^2 of a fitted curve over the positive-count points,
// descriptive goodness comparable across models.
double log_r2(const std::vector<SeriesPoint>& pts,
              const std::function<double(double)>& log_model) {
    double sy = 0;
    int m = 0;
    for (const auto& p : pts)
        if (p.n > 0) {
            sy += std::log(p.n);
            ++m;
        }
    if (m == 0) return 0;
    const double ybar = sy / m;
    double ss_res = 0, ss_tot = 0, scale = 0;
    for (const auto& p : pts)
        if (p.n > 0) {
            const double y = std::log(p.n);
            const double r = y - log_model(p.t);
            ss_res += r * r;
            ss_tot += (y - ybar) * (y - ybar);
            scale += y * y;
        }
    return r2_of(ss_res, ss_tot, scale);
}

}  // namespace

std::vector<SeriesPoint> series_points(const ReferralSeries& s) {
    std::vector<SeriesPoint> pts(s.bins.size());
    for (std::size_t k = 0; k < s.bins.size(); ++k)
        pts[k] = SeriesPoint{static_cast<double>(k + 1),
                             static_cast<double>(s.bins[k])};
    return pts;
}

std::vector<SeriesPoint> series_points(const PageSeries& s) {
    std::vector<SeriesPoint> pts;
    pts.reserve(s.counts.size());
    for (const auto& [page, count] : s.counts)
        pts.push_back(SeriesPoint{static_cast<double>(page),
                                  static_cast<double>(count)});
    return pts;
}

FitResult fit_power_law_ls(std::span<const SeriesPoint> pts,
                           const FitOptions& opts) {
    std::vector<SeriesPoint> use = log_usable(pts, opts);
    if (use.size() < 3)
        throw FitError("too few points: power-law fit needs >= 3 usable, got " +
                       std::to_string(use.size()));

    std::vector<double> x(use.size()), y(use.size()), w(use.size());
    for (std::size_t i = 0; i < use.size(); ++i) {
        x[i] = std::log(use[i].t);
        y[i] = std::log(use[i].n);
        w[i] = weight_of(use[i], opts.weighting);
    }
    LinFit f = linear_fit(x, y, w);

    FitResult r;
    r.model = FitModel::power_law;
    r.exponent_beta = -f.slope;
    r.beta_stderr = f.slope_stderr;
    r.prefactor_C = std::exp(f.intercept);
    r.goodness_r2 = r2_of(f.ss_res, f.ss_tot, f.y_scale);
    r.fit_range = used_range(use);
    r.n_points = static_cast<int>(use.size());
    return r;
}

FitResult fit_power_law_poisson(std::span<const SeriesPoint> pts,
                                const FitOptions& opts) {
    std::vector<SeriesPoint> use = apply_range(pts, opts);
    if (use.size() < 3)
        throw FitError("too few points: Poisson fit needs >= 3, got " +
                       std::to_string(use.size()));
    double total = 0, sum_n_logt = 0;
    for (const auto& p : use) {
        if (p.n != std::floor(p.n))
            throw FitError("Poisson fit requires integer counts, got " +
                           std::to_string(p.n));
        total += p.n;
        sum_n_logt += p.n * std::log(p.t);
    }
    if (total <= 0) throw FitError("all-zero series");

    // Profile likelihood: C(beta) = N / sum t^-beta, so up to constants
    // l(beta) = -N log(sum_i t_i^-beta) - beta sum_i n_i log t_i.
    auto neg_loglik = [&](double beta) {
        double s = 0;
        for (const auto& p : use) s += std::pow(p.t, -beta);
        return total * std::log(s) + beta * sum_n_logt;
    };

    std::vector<std::pair<double, double>> trace;
    auto eval = [&](double beta) {
        double v = neg_loglik(beta);
        trace.emplace_back(beta, v);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "fit_power_law_poisson: non-finite objective; trace:";
            for (auto& [b, f] : trace) msg << " (" << b << "," << f << ")";
            throw FitError(msg.str());
        }
        return v;
    };

    // Golden-section minimization; the profile objective is unimodal.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = kPoissonBetaLo, hi = kPoissonBetaHi;
    double b1 = hi - gr * (hi - lo), b2 = lo + gr * (hi - lo);
    double f1 = eval(b1), f2 = eval(b2);
    int iters = 0;
    const int max_iters = 200;
    while (hi - lo > 1e-10 && iters < max_iters) {
        if (f1 < f2) {
            hi = b2;
            b2 = b1;
            f2 = f1;
            b1 = hi - gr * (hi - lo);
            f1 = eval(b1);
        } else {
            lo = b1;
            b1 = b2;
            f1 = f2;
            b2 = lo + gr * (hi - lo);
            f2 = eval(b2);
        }
        ++iters;
    }
    const double beta = 0.5 * (lo + hi);
    double sum_pow = 0;
    for (const auto& p : use) sum_pow += std::pow(p.t, -beta);
    const double c = total / sum_pow;

    // Profile Fisher information for the beta standard error.
    double s0 = 0, s1 = 0, s2 = 0;
    for (const auto& p : use) {
        const double mu = c * std::pow(p.t, -beta);
        const double lt = std::log(p.t);
        s0 += mu;
        s1 += mu * lt;
        s2 += mu * lt * lt;
    }
    const double info = s2 - s1 * s1 / s0;

    FitResult r;
    r.model = FitModel::power_law;
    r.exponent_beta = beta;
    r.beta_stderr = info > 0 ? 1.0 / std::sqrt(info) : 0.0;
    r.prefactor_C = c;
    r.goodness_r2 = log_r2(use, [&](double t) {
        return std::log(c) - beta * std::log(t);
    });
    r.fit_range = used_range(use);
    r.n_points = static_cast<int>(use.size());
    r.converged = iters < max_iters;
    r.degenerate = beta > kPoissonBetaHi - 1e-6 || beta < kPoissonBetaLo + 1e-6;
    return r;
}

FitResult fit_stretched_exp(std::span<const SeriesPoint> pts,
                            const FitOptions& opts) {
    std::vector<SeriesPoint> use = log_usable(pts, opts);
    if (use.size() < 4)
        throw FitError("too few points: stretched-exp fit needs >= 4 usable, got " +
                       std::to_string(use.size()));

    std::vector<double> y(use.size()), w(use.size());
    for (std::size_t i = 0; i < use.size(); ++i) {
        y[i] = std::log(use[i].n);
        w[i] = weight_of(use[i], opts.weighting);
    }

    // For fixed b the model ln n = c0 + c1 * t^b is linear; profile b.
    std::vector<double> x(use.size());
    auto sse_at = [&](double b) -> std::pair<double, LinFit> {
        for (std::size_t i = 0; i < use.size(); ++i) x[i] = std::pow(use[i].t, b);
        LinFit f = linear_fit(x, y, w);
        return {f.ss_res, f};
    };

    double best_b = kStretchBMin;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double b = kStretchBMin; b <= kStretchBMax + 1e-12; b += 0.01) {
        double sse = sse_at(b).first;
        if (sse < best_sse) {
            best_sse = sse;
            best_b = b;
        }
    }

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(kStretchBMin, best_b - 0.01);
    double hi = std::min(kStretchBMax, best_b + 0.01);
    double b1 = hi - gr * (hi - lo), b2 = lo + gr * (hi - lo);
    double f1 = sse_at(b1).first, f2 = sse_at(b2).first;
    int iters = 0;
    const int max_iters = 300;
    while (hi - lo > 1e-12 &&
           std::abs(f1 - f2) > 1e-10 * std::max(1.0, std::max(f1, f2)) &&
           iters < max_iters) {
        if (f1 < f2) {
            hi = b2;
            b2 = b1;
            f2 = f1;
            b1 = hi - gr * (hi - lo);
            f1 = sse_at(b1).first;
        } else {
            lo = b1;
            b1 = b2;
            f1 = f2;
            b2 = lo + gr * (hi - lo);
            f2 = sse_at(b2).first;
        }
        ++iters;
    }
    const double b = 0.5 * (lo + hi);
    auto [sse, lin] = sse_at(b);
    if (!std::isfinite(sse))
        throw FitError("fit_stretched_exp: non-finite objective at b=" +
                       std::to_string(b));

    FitResult r;
    r.model = FitModel::stretched_exp;
    r.stretch_a = -lin.slope;
    r.stretch_b = b;
    r.prefactor_C = std::exp(lin.intercept);
    r.goodness_r2 = r2_of(lin.ss_res, lin.ss_tot, lin.y_scale);
    r.fit_range = used_range(use);
    r.n_points = static_cast<int>(use.size());
    r.converged = true;
    r.degenerate = b <= kStretchBMin + 1e-9;
    return r;
}

FitResult fit_power_law_ls(const ReferralSeries& s, const FitOptions& opts) {
    return fit_power_law_ls(std::span<const SeriesPoint>(series_points(s)), opts);
}
FitResult fit_power_law_ls(const PageSeries& s, const FitOptions& opts) {
    return fit_power_law_ls(std::span<const SeriesPoint>(series_points(s)), opts);
}
FitResult fit_power_law_poisson(const ReferralSeries& s, const FitOptions& opts) {
    return fit_power_law_poisson(std::span<const SeriesPoint>(series_points(s)), opts);
}
FitResult fit_power_law_poisson(const PageSeries& s, const FitOptions& opts) {
    return fit_power_law_poisson(std::span<const SeriesPoint>(series_points(s)), opts);
}
FitResult fit_stretched_exp(const ReferralSeries& s, const FitOptions& opts) {
    return fit_stretched_exp(std::span<const SeriesPoint>(series_points(s)), opts);
}
FitResult fit_stretched_exp(const PageSeries& s, const FitOptions& opts) {
    return fit_stretched_exp(std::span<const SeriesPoint>(series_points(s)), opts);
}

FitComparison compare_fits(std::span<const SeriesPoint> pts,
                           const FitOptions& opts) {
    FitComparison c;
    c.power_law = fit_power_law_ls(pts, opts);
    c.stretched_exp = fit_stretched_exp(pts, opts);
    c.delta_r2 = c.power_law.goodness_r2 - c.stretched_exp.goodness_r2;
    c.winner = c.delta_r2 >= 0 ? FitModel::power_law : FitModel::stretched_exp;

    std::vector<SeriesPoint> use = log_usable(pts, opts);
    for (const auto& p : use) {
        const double y = std::log(p.n);
        c.t.push_back(p.t);
        c.residual_power_law.push_back(
            y - (std::log(c.power_law.prefactor_C) -
                 c.power_law.exponent_beta * std::log(p.t)));
        c.residual_stretched_exp.push_back(
            y - (std::log(c.stretched_exp.prefactor_C) -
                 c.stretched_exp.stretch_a * std::pow(p.t, c.stretched_exp.stretch_b)));
    }
    return c;
}

FitComparison compare_fits(const ReferralSeries& s, const FitOptions& opts) {
    return compare_fits(std::span<const SeriesPoint>(series_points(s)), opts);
}
FitComparison compare_fits(const PageSeries& s, const FitOptions& opts) {
    return compare_fits(std::span<const SeriesPoint>(series_points(s)), opts);
}

nlohmann::json to_json(const FitComparison& c) {
    return nlohmann::json{
        {"power_law", to_json(c.power_law)},
        {"stretched_exp", to_json(c.stretched_exp)},
        {"delta_r2", c.delta_r2},
        {"winner", fit_model_name(c.winner)},
        {"t", c.t},
        {"residual_power_law", c.residual_power_law},
        {"residual_stretched_exp", c.residual_stretched_exp},
    };
}

}  // namespace webattn
