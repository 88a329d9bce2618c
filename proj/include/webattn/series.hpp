#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "webattn/core_types.hpp"

namespace webattn {

// Maps a full referrer URL to an archive page number >= 1. The pattern is
// an ECMAScript regex whose first capture group is the page number; URLs
// that do not match (or an empty pattern) use default_page.
class PageExtractor {
public:
    PageExtractor() = default;
    explicit PageExtractor(std::string pattern, int default_page = 1);

    int extract(std::string_view url) const;

    const std::string& pattern() const { return pattern_; }
    int default_page() const { return default_page_; }

private:
    std::string pattern_;
    int default_page_ = 1;
    std::regex re_;
    bool has_pattern_ = false;
};

// Bin events into 24-hr days since the first referral. All events must
// share one referrer_id; trailing empty days up to the last event are
// materialized as zeros so downstream fitting sees the gaps.
ReferralSeries bin_by_day(const std::vector<ClickEvent>& events);

// Count events by extracted page number; referrer_id must carry the full
// (un-normalized) referrer URL.
PageSeries bin_by_page(const std::vector<ClickEvent>& events,
                       const PageExtractor& px);

}  // namespace webattn
