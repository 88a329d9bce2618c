#include "webattn/series.hpp"

#include <algorithm>
#include <charconv>

namespace webattn {

PageExtractor::PageExtractor(std::string pattern, int default_page)
    : pattern_(std::move(pattern)), default_page_(default_page) {
    if (default_page_ < 1)
        throw SeriesError("PageExtractor: default_page must be >= 1");
    if (!pattern_.empty()) {
        re_ = std::regex(pattern_, std::regex::ECMAScript);
        has_pattern_ = true;
    }
}

int PageExtractor::extract(std::string_view url) const {
    if (!has_pattern_) return default_page_;
    std::cmatch m;
    if (!std::regex_search(url.data(), url.data() + url.size(), m, re_) ||
        m.size() < 2 || !m[1].matched)
        return default_page_;
    int page = 0;
    auto [p, ec] = std::from_chars(m[1].first, m[1].second, page);
    if (ec != std::errc{} || p != m[1].second || page < 1) return default_page_;
    return page;
}

ReferralSeries bin_by_day(const std::vector<ClickEvent>& events) {
    if (events.empty()) throw SeriesError("bin_by_day: no events");
    const std::string& ref = events.front().referrer_id;
    Instant t0 = events.front().at;
    for (const auto& e : events) {
        if (e.referrer_id != ref)
            throw SeriesError("bin_by_day: mixed referrer_ids ('" + ref +
                              "' vs '" + e.referrer_id + "')");
        t0 = std::min(t0, e.at);
    }

    ReferralSeries s{ref, t0, {}};
    for (const auto& e : events) {
        auto k = static_cast<std::size_t>((e.at - t0) / kSecondsPerDay);
        if (k >= s.bins.size()) s.bins.resize(k + 1, 0);
        ++s.bins[k];
    }
    return s;
}

PageSeries bin_by_page(const std::vector<ClickEvent>& events,
                       const PageExtractor& px) {
    PageSeries s;
    for (const auto& e : events) ++s.counts[px.extract(e.referrer_id)];
    return s;
}

}  // namespace webattn
