#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "webattn/core_types.hpp"

namespace webattn {

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zeros are unusable in log space; drop removes them, add_half replaces
// them with 0.5 so sparse tails stay visible.
enum class ZeroPolicy { drop, add_half };
enum class Weighting { uniform, count };

struct FitOptions {
    std::optional<FitRange> range;  // default: full series
    ZeroPolicy zero_policy = ZeroPolicy::drop;
    Weighting weighting = Weighting::uniform;
};

struct SeriesPoint {
    double t = 0;
    double n = 0;
};

std::vector<SeriesPoint> series_points(const ReferralSeries& s);
std::vector<SeriesPoint> series_points(const PageSeries& s);

// Least squares on (ln t, ln n); beta is minus the slope.
FitResult fit_power_law_ls(std::span<const SeriesPoint> pts,
                           const FitOptions& opts = {});

// Poisson maximum likelihood with mean C * t^-beta; zero bins contribute
// directly, so no zero policy is involved.
FitResult fit_power_law_poisson(std::span<const SeriesPoint> pts,
                                const FitOptions& opts = {});

// Least squares of ln n against ln C - a * t^b with b constrained to
// (0, 1]; coarse grid over b followed by golden-section refinement.
FitResult fit_stretched_exp(std::span<const SeriesPoint> pts,
                            const FitOptions& opts = {});

FitResult fit_power_law_ls(const ReferralSeries& s, const FitOptions& opts = {});
FitResult fit_power_law_ls(const PageSeries& s, const FitOptions& opts = {});
FitResult fit_power_law_poisson(const ReferralSeries& s, const FitOptions& opts = {});
FitResult fit_power_law_poisson(const PageSeries& s, const FitOptions& opts = {});
FitResult fit_stretched_exp(const ReferralSeries& s, const FitOptions& opts = {});
FitResult fit_stretched_exp(const PageSeries& s, const FitOptions& opts = {});

struct FitComparison {
    FitResult power_law;
    FitResult stretched_exp;
    double delta_r2 = 0;  // power r2 minus stretched r2
    FitModel winner = FitModel::power_law;
    std::vector<double> t;
    std::vector<double> residual_power_law;     // log-space residuals
    std::vector<double> residual_stretched_exp;
};

FitComparison compare_fits(std::span<const SeriesPoint> pts,
                           const FitOptions& opts = {});
FitComparison compare_fits(const ReferralSeries& s, const FitOptions& opts = {});
FitComparison compare_fits(const PageSeries& s, const FitOptions& opts = {});

nlohmann::json to_json(const FitComparison& c);

}  // namespace webattn
