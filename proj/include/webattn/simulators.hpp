#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "webattn/core_types.hpp"

namespace webattn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Optional receiver for the simulated click stream; every simulator emits
// the same ClickEvent schema the log pipeline produces, so the identical
// analysis runs on simulated and real data.
using ClickSink = std::function<void(const ClickEvent&)>;

// ---------------------------------------------------------------------------
// Front-page rank decay: click probability falls as rank^-beta, links march
// down the page as new ones are posted, so with one link per day rank == age+1.

struct RankDecayConfig {
    double beta = 1.5;
    std::int64_t visitors_per_day = 100000;
    int links_per_day = 1;
    // Attractiveness A_j by link creation index; links past the end get 1.0.
    std::vector<double> attractiveness;
    // Probability that a visitor clicks the rank-1 link of unit attractiveness.
    double top_click_prob = 0.1;
    // Links older than this many days leave the front page.
    int front_page_capacity = 365;
    int horizon_days = 365;
    std::uint64_t seed = 1;
};

void validate(const RankDecayConfig& cfg);

// A * r^-beta, the per-visitor click rate of the link at rank r.
double rank_rate(std::int64_t rank, double beta, double attractiveness);

struct RankDecayResult {
    // One series per link; bins indexed by age in days since the link's
    // post day, t0 at the post instant.
    std::vector<ReferralSeries> links;
    std::vector<int> post_day;
    // (day, link) cells whose raw click probability exceeded 1 and was clamped.
    std::int64_t clamped_cells = 0;
};

RankDecayResult simulate_rank_decay(const RankDecayConfig& cfg,
                                    const ClickSink& sink = {});

// ---------------------------------------------------------------------------
// Paginated archive: posts move to later pages in blocks of k; page-level
// click probability falls as page^-beta_page, split over the page's posts.

struct PaginatedConfig {
    int posts_per_page = 10;
    int posts_per_day = 1;
    double beta_page = 1.5;
    std::int64_t visitors_per_day = 100000;
    double top_click_prob = 0.1;
    int horizon_days = 365;
    std::uint64_t seed = 1;
};

void validate(const PaginatedConfig& cfg);

struct PaginatedResult {
    PageSeries pages;                   // clicks by the page the post was on when clicked
    std::vector<ReferralSeries> posts;  // per-post daily series, as in RankDecayResult
    std::vector<int> post_day;
    std::int64_t clamped_cells = 0;
};

PaginatedResult simulate_paginated(const PaginatedConfig& cfg,
                                   const ClickSink& sink = {});

// ---------------------------------------------------------------------------
// Revisit model: visitors return with power-law gaps p(tau) ~ tau^-alpha and
// read every item published since their last visit; predicts beta = alpha - 1.

struct RevisitConfig {
    double alpha = 1.5;
    std::int64_t num_visitors = 100000;
    int tau_min = 1;        // days; gap support is [tau_min, horizon_days]
    int items_per_day = 1;
    int horizon_days = 365;
    std::uint64_t seed = 1;
};

void validate(const RevisitConfig& cfg);

struct RevisitResult {
    ReferralSeries by_age;  // accesses binned by item age at access time
    std::int64_t total_accesses = 0;
};

RevisitResult simulate_revisit(const RevisitConfig& cfg,
                               const ClickSink& sink = {});

// ---------------------------------------------------------------------------
// Novelty model: dN/dt = N(t) r(t) with a decaying factor r, so the daily
// increment is n(t) = N(0) exp(int_0^t r) r(t).

struct NoveltyDecay {
    enum class Kind { stretched_exp, power };
    Kind kind = Kind::stretched_exp;
    double a = 0.4;     // stretched_exp: r(t) = exp(-a t^b)
    double b = 0.4;
    double beta = 1.5;  // power: r(t) = min(1, t^-beta); unit plateau keeps
                        // the integral finite at 0 and convergent for beta > 1
};

struct NoveltyConfig {
    double initial_count = 100.0;  // N(0)
    NoveltyDecay decay;
    double rate_scale = 1.0;       // multiplies r(t); 0 freezes N
    double dt = 1e-3;              // Euler step, days
    int horizon_days = 100;
};

void validate(const NoveltyConfig& cfg);

double novelty_decay_factor(double t, const NoveltyConfig& cfg);  // r(t)
// Closed-form N(t) = N(0) exp(int_0^t r), integral by adaptive quadrature
// to relative tolerance 1e-8.
double novelty_cumulative(double t, const NoveltyConfig& cfg);
// Closed-form n(t) = N(t) r(t).
double novelty_rate(double t, const NoveltyConfig& cfg);

struct NoveltyResult {
    ReferralSeries series;           // per-day increments rounded to counts
    std::vector<double> increments;  // unrounded per-day increments
};

NoveltyResult simulate_novelty(const NoveltyConfig& cfg,
                               const ClickSink& sink = {});

// ---------------------------------------------------------------------------
// Repost cascade: the root link receives a rank-decay stream; every click
// spawns a reposting child with probability q after a geometric delay, and
// each child runs its own independent rank-decay stream.

struct CascadeConfig {
    double repost_prob = 0.0;      // q, per click
    double child_delay_mean = 1.0; // geometric delay in days, support {0,1,...}
    RankDecayConfig base;          // every node's own referral stream
    std::int64_t max_nodes = 0;    // 0 = unset; setting it overrides the subcritical check
    std::uint64_t seed = 1;
};

void validate(const CascadeConfig& cfg);

// q times the expected lifetime clicks of one node under the base config.
double cascade_expected_offspring(const CascadeConfig& cfg);

struct CascadeNode {
    std::int64_t id = 0;
    std::int64_t parent = -1;  // -1 for the root
    int post_day = 0;
};

struct CascadeResult {
    ReferralSeries direct;  // the root's own stream
    ReferralSeries total;   // all nodes summed, binned from the root's first click
    std::vector<CascadeNode> tree;
    double expected_offspring = 0.0;
    bool cap_reached = false;
    std::int64_t clamped_cells = 0;
};

CascadeResult simulate_cascade(const CascadeConfig& cfg,
                               const ClickSink& sink = {});

}  // namespace webattn
