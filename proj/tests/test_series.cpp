#include "doctest.h"

#include <random>

#include "webattn/series.hpp"

using namespace webattn;

namespace {

ClickEvent ev(std::int64_t at, const std::string& ref = "blog") {
    return ClickEvent{Instant{at}, ref, "/a", "v"};
}

}  // namespace

TEST_CASE("bin_by_day boundaries are half-open 24-hr windows") {
    const std::int64_t t0 = 1255910400 + 12345;  // an arbitrary instant

    SUBCASE("event at t0+86399 shares the first day") {
        auto s = bin_by_day({ev(t0), ev(t0 + 86399)});
        CHECK(s.bins == std::vector<std::int64_t>{2});
        CHECK(s.t0.seconds == t0);
    }
    SUBCASE("event at t0+86400 opens day two") {
        auto s = bin_by_day({ev(t0), ev(t0 + 86400)});
        CHECK(s.bins == std::vector<std::int64_t>{1, 1});
    }
    SUBCASE("gaps are materialized as zero bins") {
        auto s = bin_by_day({ev(t0), ev(t0 + 3 * 86400 + 1)});
        CHECK(s.bins == std::vector<std::int64_t>{1, 0, 0, 1});
    }
}

TEST_CASE("bin_by_day rejects empty and mixed input") {
    CHECK_THROWS_AS(bin_by_day({}), SeriesError);
    CHECK_THROWS_AS(bin_by_day({ev(0, "a"), ev(1, "b")}), SeriesError);
}

TEST_CASE("bin_by_day does not require sorted events") {
    auto s = bin_by_day({ev(86400 * 2), ev(0), ev(100)});
    CHECK(s.t0.seconds == 0);
    CHECK(s.bins == std::vector<std::int64_t>{2, 0, 1});
}

TEST_CASE("bin_by_day properties: conservation and translation invariance") {
    std::mt19937 gen(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ClickEvent> events;
        const int n = 1 + static_cast<int>(gen() % 200);
        for (int i = 0; i < n; ++i)
            events.push_back(ev(static_cast<std::int64_t>(gen() % 1000000)));
        auto s = bin_by_day(events);
        CHECK(series_total(s) == n);
        CHECK(s.bins.front() >= 1);
        CHECK(s.bins.back() >= 1);  // trailing zeros stop at the last event

        const std::int64_t shift = static_cast<std::int64_t>(gen() % 999983) + 17;
        std::vector<ClickEvent> shifted = events;
        for (auto& e : shifted) e.at.seconds += shift;
        CHECK(bin_by_day(shifted).bins == s.bins);
    }
}

TEST_CASE("page extractor pulls the first capture group") {
    PageExtractor px(R"([?&]page=(\d+))");
    CHECK(px.extract("http://museumofhoaxes.com/index.php?page=2") == 2);
    CHECK(px.extract("http://museumofhoaxes.com/index.php?page=5") == 5);
    CHECK(px.extract("http://museumofhoaxes.com/") == 1);
    CHECK(px.extract("http://x.example/?page=0") == 1);  // result must be >= 1

    PageExtractor path_rule(R"(/page/(\d+))", 1);
    CHECK(path_rule.extract("http://flabber.nl/archief/page/3") == 3);

    PageExtractor none;
    CHECK(none.extract("http://anything.example/x") == 1);

    CHECK_THROWS_AS(PageExtractor("x", 0), SeriesError);
}

TEST_CASE("bin_by_page counts events per extracted page") {
    PageExtractor px(R"([?&]page=(\d+))");
    std::vector<ClickEvent> events;
    for (int i = 0; i < 3; ++i)
        events.push_back(ev(i, "http://m.example/index.php?page=2"));
    events.push_back(ev(9, "http://m.example/index.php?page=5"));
    auto s = bin_by_page(events, px);
    REQUIRE(s.counts.size() == 2);
    CHECK(s.counts.at(2) == 3);
    CHECK(s.counts.at(5) == 1);
    CHECK(series_total(s) == 4);
}

TEST_CASE("bin_by_page defaults bare front-page URLs to page 1") {
    PageExtractor px(R"([?&]page=(\d+))");
    std::vector<ClickEvent> events{ev(0, "http://m.example/"),
                                   ev(1, "http://m.example/")};
    auto s = bin_by_page(events, px);
    REQUIRE(s.counts.size() == 1);
    CHECK(s.counts.at(1) == 2);
}

TEST_CASE("bin_by_page of nothing is an empty series") {
    CHECK(bin_by_page({}, PageExtractor()).counts.empty());
}
