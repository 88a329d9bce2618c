#include "webattn/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "webattn/quadrature.hpp"
#include "webattn/rng.hpp"

namespace webattn {

namespace {

constexpr const char* kSimTarget = "/article";

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

// Spread a day's clicks over the 24 hours so event streams look like real
// traffic; every timestamp stays inside the day's bin.
void emit_day(const ClickSink& sink, std::int64_t day, std::int64_t clicks,
              const std::string& referrer) {
    if (!sink || clicks <= 0) return;
    for (std::int64_t i = 0; i < clicks; ++i) {
        const std::int64_t off = i * kSecondsPerDay / clicks;
        sink(ClickEvent{Instant{day * kSecondsPerDay + off}, referrer,
                        kSimTarget, "v" + std::to_string(i)});
    }
}

double attractiveness_of(const std::vector<double>& a, std::size_t j) {
    return j < a.size() ? a[j] : 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// rank decay

void validate(const RankDecayConfig& cfg) {
    require(cfg.beta > 0, "rank: beta must be > 0");
    require(cfg.visitors_per_day >= 0, "rank: visitors_per_day must be >= 0");
    require(cfg.links_per_day >= 1, "rank: links_per_day must be >= 1");
    require(cfg.top_click_prob > 0 && cfg.top_click_prob <= 1,
            "rank: top_click_prob must be in (0, 1]");
    require(cfg.front_page_capacity >= 1, "rank: front_page_capacity must be >= 1");
    require(cfg.horizon_days >= 1, "rank: horizon_days must be >= 1");
    for (double a : cfg.attractiveness)
        require(a > 0, "rank: attractiveness weights must be > 0");
}

double rank_rate(std::int64_t rank, double beta, double attractiveness) {
    if (rank < 1) throw ConfigError("rank_rate: rank must be >= 1");
    if (beta <= 0) throw ConfigError("rank_rate: beta must be > 0");
    if (attractiveness <= 0) throw ConfigError("rank_rate: attractiveness must be > 0");
    return attractiveness * std::pow(static_cast<double>(rank), -beta);
}

RankDecayResult simulate_rank_decay(const RankDecayConfig& cfg,
                                    const ClickSink& sink) {
    validate(cfg);
    Rng rng(cfg.seed);
    const int L = cfg.links_per_day;
    const int num_links = cfg.horizon_days * L;

    RankDecayResult res;
    res.links.resize(num_links);
    res.post_day.resize(num_links);
    for (int j = 0; j < num_links; ++j) {
        const int p = j / L;
        res.post_day[j] = p;
        res.links[j].referrer_id = "sim://rank/post" + std::to_string(j);
        res.links[j].t0 = Instant{static_cast<std::int64_t>(p) * kSecondsPerDay};
        res.links[j].bins.assign(cfg.horizon_days - p, 0);
    }

    for (int d = 0; d < cfg.horizon_days; ++d) {
        const int max_age = std::min(d, cfg.front_page_capacity - 1);
        for (int a = 0; a <= max_age; ++a) {
            const int p = d - a;
            for (int s = L - 1; s >= 0; --s) {
                const int j = p * L + s;
                const std::int64_t rank =
                    static_cast<std::int64_t>(a) * L + (L - 1 - s) + 1;
                double prob = cfg.top_click_prob *
                              rank_rate(rank, cfg.beta,
                                        attractiveness_of(cfg.attractiveness, j));
                if (prob > 1.0) {
                    prob = 1.0;
                    ++res.clamped_cells;
                }
                const std::int64_t clicks = rng.binomial(cfg.visitors_per_day, prob);
                res.links[j].bins[a] += clicks;
                emit_day(sink, d, clicks, res.links[j].referrer_id);
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// paginated archive

void validate(const PaginatedConfig& cfg) {
    require(cfg.posts_per_page >= 1, "paginated: posts_per_page must be >= 1");
    require(cfg.posts_per_day >= 1, "paginated: posts_per_day must be >= 1");
    require(cfg.beta_page > 0, "paginated: beta_page must be > 0");
    require(cfg.visitors_per_day >= 0, "paginated: visitors_per_day must be >= 0");
    require(cfg.top_click_prob > 0 && cfg.top_click_prob <= 1,
            "paginated: top_click_prob must be in (0, 1]");
    require(cfg.horizon_days >= 1, "paginated: horizon_days must be >= 1");
}

PaginatedResult simulate_paginated(const PaginatedConfig& cfg,
                                   const ClickSink& sink) {
    validate(cfg);
    Rng rng(cfg.seed);
    const int R = cfg.posts_per_day;
    const int k = cfg.posts_per_page;
    const int num_posts = cfg.horizon_days * R;

    PaginatedResult res;
    res.posts.resize(num_posts);
    res.post_day.resize(num_posts);
    for (int j = 0; j < num_posts; ++j) {
        const int p = j / R;
        res.post_day[j] = p;
        res.posts[j].referrer_id = "sim://paginated/post" + std::to_string(j);
        res.posts[j].t0 = Instant{static_cast<std::int64_t>(p) * kSecondsPerDay};
        res.posts[j].bins.assign(cfg.horizon_days - p, 0);
    }

    for (int d = 0; d < cfg.horizon_days; ++d) {
        const int total_posts = (d + 1) * R;
        // m counts the posts published after a given post; m ascending is
        // newest first, the same order the rank simulator uses.
        for (int m = 0; m < total_posts; ++m) {
            const int p = d - m / R;
            const int s = R - 1 - m % R;
            const int j = p * R + s;
            const int page = 1 + m / k;
            const int occupancy = std::min(total_posts - (m / k) * k, k);
            double page_prob =
                cfg.top_click_prob * std::pow(static_cast<double>(page), -cfg.beta_page);
            if (page_prob > 1.0) {
                page_prob = 1.0;
                ++res.clamped_cells;
            }
            const double prob = page_prob / occupancy;
            const std::int64_t clicks = rng.binomial(cfg.visitors_per_day, prob);
            res.posts[j].bins[d - p] += clicks;
            res.pages.counts[page] += clicks;
            emit_day(sink, d, clicks,
                     "sim://paginated/archive?page=" + std::to_string(page));
        }
    }
    // Pages that existed but drew no clicks still appear, with zero counts.
    const int last_page = 1 + (num_posts - 1) / k;
    for (int page = 1; page <= last_page; ++page) res.pages.counts.emplace(page, 0);
    return res;
}

// ---------------------------------------------------------------------------
// revisit model

void validate(const RevisitConfig& cfg) {
    require(cfg.alpha > 1, "revisit: alpha must be > 1");
    require(cfg.num_visitors >= 1, "revisit: num_visitors must be >= 1");
    require(cfg.tau_min >= 1, "revisit: tau_min must be >= 1 day");
    require(cfg.items_per_day >= 1, "revisit: items_per_day must be >= 1");
    require(cfg.horizon_days >= cfg.tau_min,
            "revisit: horizon_days must be >= tau_min");
}

RevisitResult simulate_revisit(const RevisitConfig& cfg, const ClickSink& sink) {
    validate(cfg);
    Rng rng(cfg.seed);
    const std::int64_t horizon = cfg.horizon_days;

    // Inverse CDF of the truncated continuous power law on [tau_min, horizon].
    const double e = 1.0 - cfg.alpha;
    const double lo_pow = std::pow(static_cast<double>(cfg.tau_min), e);
    const double hi_pow = std::pow(static_cast<double>(horizon), e);
    auto sample_gap = [&]() -> std::int64_t {
        const double u = rng.uniform();
        const double tau = std::pow(lo_pow + u * (hi_pow - lo_pow), 1.0 / e);
        return std::max<std::int64_t>(1, std::llround(tau));
    };

    // Renewal burn-in so visit phases are near stationary by day 0; visits
    // past 2*horizon cannot touch an in-window (item, age) pair.
    const std::int64_t burn_in = 4 * horizon;
    RevisitResult res;
    res.by_age.referrer_id = "sim://revisit";
    res.by_age.t0 = Instant{0};
    res.by_age.bins.assign(horizon, 0);

    for (std::int64_t v = 0; v < cfg.num_visitors; ++v) {
        std::int64_t t = -burn_in;
        while (t < 2 * horizon) {
            const std::int64_t next = t + sample_gap();
            // items published in (t, next], still within their age window
            const std::int64_t p_lo = std::max<std::int64_t>(
                {t + 1, 0, next - horizon + 1});
            const std::int64_t p_hi = std::min(next, horizon - 1);
            for (std::int64_t p = p_lo; p <= p_hi; ++p) {
                const std::int64_t age = next - p;
                res.by_age.bins[age] += cfg.items_per_day;
                res.total_accesses += cfg.items_per_day;
                if (sink)
                    sink(ClickEvent{Instant{next * kSecondsPerDay},
                                    "sim://revisit",
                                    "/item" + std::to_string(p),
                                    "v" + std::to_string(v)});
            }
            t = next;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// novelty model

void validate(const NoveltyConfig& cfg) {
    require(cfg.initial_count > 0, "novelty: initial_count must be > 0");
    require(cfg.rate_scale >= 0, "novelty: rate_scale must be >= 0");
    require(cfg.dt > 0, "novelty: dt must be > 0");
    require(cfg.horizon_days >= 1, "novelty: horizon_days must be >= 1");
    if (cfg.decay.kind == NoveltyDecay::Kind::stretched_exp) {
        require(cfg.decay.a > 0, "novelty: stretched-exp a must be > 0");
        require(cfg.decay.b > 0 && cfg.decay.b <= 1,
                "novelty: stretched-exp b must be in (0, 1]");
    } else {
        require(cfg.decay.beta > 0, "novelty: power beta must be > 0");
    }
}

double novelty_decay_factor(double t, const NoveltyConfig& cfg) {
    double r;
    if (cfg.decay.kind == NoveltyDecay::Kind::stretched_exp)
        r = std::exp(-cfg.decay.a * std::pow(t, cfg.decay.b));
    else
        r = t <= 1.0 ? 1.0 : std::pow(t, -cfg.decay.beta);
    return cfg.rate_scale * r;
}

double novelty_cumulative(double t, const NoveltyConfig& cfg) {
    validate(cfg);
    if (t <= 0) return cfg.initial_count;
    double integral;
    if (cfg.decay.kind == NoveltyDecay::Kind::stretched_exp) {
        // substitute u = s^b; the transformed integrand is smooth at 0,
        // where exp(-a s^b) itself has an unbounded derivative
        const double a = cfg.decay.a, b = cfg.decay.b;
        integral = integrate(
                       [&](double u) {
                           return std::exp(-a * u) * std::pow(u, 1.0 / b - 1.0);
                       },
                       0.0, std::pow(t, b), 1e-8) /
                   b;
    } else {
        // r = min(1, s^-beta): unit plateau up to 1, smooth tail beyond
        integral = std::min(t, 1.0);
        if (t > 1.0)
            integral += integrate(
                [&](double s) { return std::pow(s, -cfg.decay.beta); }, 1.0, t,
                1e-8);
    }
    return cfg.initial_count * std::exp(cfg.rate_scale * integral);
}

double novelty_rate(double t, const NoveltyConfig& cfg) {
    return novelty_cumulative(t, cfg) * novelty_decay_factor(t, cfg);
}

NoveltyResult simulate_novelty(const NoveltyConfig& cfg, const ClickSink& sink) {
    validate(cfg);
    const int steps_per_day = static_cast<int>(std::ceil(1.0 / cfg.dt - 1e-12));
    const double h = 1.0 / steps_per_day;

    NoveltyResult res;
    res.series.referrer_id = "sim://novelty";
    res.series.t0 = Instant{0};
    res.increments.reserve(cfg.horizon_days);

    double n_cum = cfg.initial_count;
    for (int day = 0; day < cfg.horizon_days; ++day) {
        const double day_start = n_cum;
        for (int i = 0; i < steps_per_day; ++i) {
            const double t = day + i * h;
            n_cum += h * n_cum * novelty_decay_factor(t, cfg);
        }
        if (!std::isfinite(n_cum))
            throw SimError("novelty: step-size instability, N diverged on day " +
                           std::to_string(day));
        const double inc = n_cum - day_start;
        if (inc > 9.0e18)
            throw SimError("novelty: per-day increment overflows a count on day " +
                           std::to_string(day));
        res.increments.push_back(inc);
        const std::int64_t count = std::llround(inc);
        res.series.bins.push_back(count);
        emit_day(sink, day, count, "sim://novelty");
    }
    return res;
}

// ---------------------------------------------------------------------------
// repost cascade

void validate(const CascadeConfig& cfg) {
    require(cfg.repost_prob >= 0 && cfg.repost_prob < 1,
            "cascade: repost_prob must be in [0, 1)");
    require(cfg.child_delay_mean >= 0, "cascade: child_delay_mean must be >= 0");
    require(cfg.max_nodes >= 0, "cascade: max_nodes must be >= 0");
    validate(cfg.base);
}

double cascade_expected_offspring(const CascadeConfig& cfg) {
    const RankDecayConfig& b = cfg.base;
    const double a0 = attractiveness_of(b.attractiveness, 0);
    const int lifetime = std::min(b.front_page_capacity, b.horizon_days);
    double clicks = 0;
    for (int age = 0; age < lifetime; ++age) {
        const std::int64_t rank =
            static_cast<std::int64_t>(age) * b.links_per_day + 1;
        clicks += static_cast<double>(b.visitors_per_day) *
                  std::min(1.0, b.top_click_prob * rank_rate(rank, b.beta, a0));
    }
    return cfg.repost_prob * clicks;
}

CascadeResult simulate_cascade(const CascadeConfig& cfg, const ClickSink& sink) {
    validate(cfg);
    CascadeResult res;
    res.expected_offspring = cascade_expected_offspring(cfg);
    if (res.expected_offspring >= 1.0 && cfg.max_nodes == 0)
        throw ConfigError(
            "cascade: supercritical (expected offspring " +
            std::to_string(res.expected_offspring) +
            " >= 1); set max_nodes to run capped");
    const std::int64_t cap = cfg.max_nodes > 0 ? cfg.max_nodes : 1000000;

    const RankDecayConfig& b = cfg.base;
    const double a0 = attractiveness_of(b.attractiveness, 0);
    const int horizon = b.horizon_days;
    Rng rng(cfg.seed);

    std::vector<std::int64_t> total_by_day(horizon, 0);
    std::vector<std::int64_t> root_by_age(horizon, 0);

    res.tree.push_back(CascadeNode{0, -1, 0});
    for (std::size_t idx = 0; idx < res.tree.size(); ++idx) {
        const CascadeNode node = res.tree[idx];
        const std::string referrer =
            "sim://cascade/node" + std::to_string(node.id);
        const int lifetime =
            std::min(b.front_page_capacity, horizon - node.post_day);
        for (int age = 0; age < lifetime; ++age) {
            const int day = node.post_day + age;
            const std::int64_t rank =
                static_cast<std::int64_t>(age) * b.links_per_day + 1;
            double prob = b.top_click_prob * rank_rate(rank, b.beta, a0);
            if (prob > 1.0) {
                prob = 1.0;
                ++res.clamped_cells;
            }
            const std::int64_t clicks = rng.binomial(b.visitors_per_day, prob);
            total_by_day[day] += clicks;
            if (idx == 0) root_by_age[age] += clicks;
            emit_day(sink, day, clicks, referrer);

            if (clicks > 0 && cfg.repost_prob > 0) {
                const std::int64_t children = rng.binomial(clicks, cfg.repost_prob);
                for (std::int64_t c = 0; c < children; ++c) {
                    const std::int64_t post =
                        day + rng.geometric(cfg.child_delay_mean);
                    if (post >= horizon) continue;
                    if (static_cast<std::int64_t>(res.tree.size()) >= cap) {
                        res.cap_reached = true;
                        break;
                    }
                    res.tree.push_back(
                        CascadeNode{static_cast<std::int64_t>(res.tree.size()),
                                    node.id, static_cast<int>(post)});
                }
            }
        }
    }

    // Both series are binned from the root's first click; no child click can
    // precede it, so the two share t0.
    int first = 0;
    while (first < horizon && root_by_age[first] == 0) ++first;
    res.direct.referrer_id = "sim://cascade/node0";
    res.total.referrer_id = "sim://cascade/total";
    res.direct.t0 = res.total.t0 =
        Instant{static_cast<std::int64_t>(first) * kSecondsPerDay};
    if (first < horizon) {
        res.direct.bins.assign(root_by_age.begin() + first, root_by_age.end());
        res.total.bins.assign(total_by_day.begin() + first, total_by_day.end());
    }
    return res;
}

}  // namespace webattn
