#pragma once

#include <cstdint>
#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace webattn {

// Seconds since the Unix epoch, UTC. All binning is relative to a series
// start instant, so absolute calendar handling is never needed.
struct Instant {
    std::int64_t seconds = 0;

    auto operator<=>(const Instant&) const = default;
};

inline Instant operator+(Instant a, std::int64_t s) { return Instant{a.seconds + s}; }
inline std::int64_t operator-(Instant a, Instant b) { return a.seconds - b.seconds; }

constexpr std::int64_t kSecondsPerDay = 86400;

// One click-through from a referring page to a target path.
// referrer_id holds the normalized referrer key, or the full referrer URL
// when the normalizer was configured to keep path components.
struct ClickEvent {
    Instant at;
    std::string referrer_id;
    std::string target_path;
    std::string visitor_key;

    bool operator==(const ClickEvent&) const = default;
};

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Referral counts binned into 24-hr days since the first referral:
// bin k covers [t0 + k*86400 s, t0 + (k+1)*86400 s). The model variable
// is t = bin index + 1, so day one is t = 1.
struct ReferralSeries {
    std::string referrer_id;
    Instant t0;
    std::vector<std::int64_t> bins;
};

// Referral counts by archive page number (page >= 1).
struct PageSeries {
    std::map<int, std::int64_t> counts;
};

std::int64_t series_total(const ReferralSeries& s);
std::int64_t series_total(const PageSeries& s);

enum class FitModel { power_law, stretched_exp };

const char* fit_model_name(FitModel m);

struct FitRange {
    int t_min = 1;
    int t_max = 1;
};

// Fitted decay curve. For power_law: n(t) = C * t^-beta.
// For stretched_exp: n(t) = C * exp(-a * t^b).
struct FitResult {
    FitModel model = FitModel::power_law;
    double exponent_beta = 0.0;
    double beta_stderr = 0.0;
    double prefactor_C = 0.0;
    double stretch_a = 0.0;
    double stretch_b = 0.0;
    double goodness_r2 = 0.0;
    FitRange fit_range;
    int n_points = 0;
    bool converged = true;
    bool degenerate = false;
};

// CSV: "t,count" rows with t = bin index + 1, or "page,count" rows.
std::string to_csv(const ReferralSeries& s);
std::string to_csv(const PageSeries& s);

nlohmann::json to_json(const ReferralSeries& s);
nlohmann::json to_json(const PageSeries& s);
nlohmann::json to_json(const FitResult& r);

std::string to_csv_row(const ClickEvent& e);
nlohmann::json to_json(const ClickEvent& e);
constexpr const char* kClickEventCsvHeader = "at,referrer_id,target_path,visitor_key";

}  // namespace webattn
