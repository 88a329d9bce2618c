#include "doctest.h"

#include "webattn/core_types.hpp"

using namespace webattn;

TEST_CASE("series_total sums day bins") {
    ReferralSeries s{"blog", Instant{0}, {3, 2, 1}};
    CHECK(series_total(s) == 6);
    s.bins = {};
    CHECK(series_total(s) == 0);
    s.bins = {0, 0, 5};
    CHECK(series_total(s) == 5);
}

TEST_CASE("series_total sums page counts") {
    PageSeries p;
    p.counts[1] = 10;
    p.counts[7] = 2;
    CHECK(series_total(p) == 12);
    CHECK(series_total(PageSeries{}) == 0);
}

TEST_CASE("referral series CSV uses t = bin index + 1") {
    ReferralSeries s{"blog", Instant{100}, {2, 0, 1}};
    CHECK(to_csv(s) == "t,count\n1,2\n2,0\n3,1\n");
}

TEST_CASE("page series CSV is page,count rows") {
    PageSeries p;
    p.counts[2] = 3;
    p.counts[5] = 1;
    CHECK(to_csv(p) == "page,count\n2,3\n5,1\n");
}

TEST_CASE("JSON mirrors series fields") {
    ReferralSeries s{"http://boingboing.net", Instant{1255910400}, {4, 1}};
    auto j = to_json(s);
    CHECK(j["referrer_id"] == "http://boingboing.net");
    CHECK(j["t0"] == 1255910400);
    CHECK(j["bins"] == nlohmann::json({4, 1}));

    PageSeries p;
    p.counts[3] = 9;
    auto pj = to_json(p);
    CHECK(pj["counts"]["3"] == 9);
}

TEST_CASE("fit result JSON carries the model-specific fields") {
    FitResult r;
    r.model = FitModel::power_law;
    r.exponent_beta = 1.5;
    r.prefactor_C = 100.0;
    r.goodness_r2 = 0.99;
    r.fit_range = {1, 100};
    r.n_points = 100;
    auto j = to_json(r);
    CHECK(j["model"] == "power_law");
    CHECK(j["exponent_beta"] == doctest::Approx(1.5));
    CHECK(!j.contains("stretch_a"));

    r.model = FitModel::stretched_exp;
    r.stretch_a = 0.4;
    r.stretch_b = 0.4;
    auto js = to_json(r);
    CHECK(js["stretch_a"] == doctest::Approx(0.4));
    CHECK(!js.contains("exponent_beta"));
}

TEST_CASE("click event CSV rows quote fields containing commas") {
    ClickEvent e{Instant{12}, "http://a.example/x,y", "/p", "1.2.3.4"};
    CHECK(to_csv_row(e) == "12,\"http://a.example/x,y\",/p,1.2.3.4");
    ClickEvent plain{Instant{5}, "http://b.example", "/p", "host"};
    CHECK(to_csv_row(plain) == "5,http://b.example,/p,host");
}
