#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support/fixtures.hpp"
#include "subloc/error.hpp"
#include "subloc/evalbench.hpp"

using namespace subloc;

TEST_CASE("config labels") {
    const auto full = EvalConfig::parse("full");
    CHECK(full.is_full());
    const auto a = EvalConfig::parse("k10h6");
    CHECK(a.k == 10u);
    CHECK(a.h == 6u);
    const auto b = EvalConfig::parse("k3hall");
    CHECK(b.k == 3u);
    CHECK_FALSE(b.h.has_value());
    for (const char* bad : {"", "k", "k10", "h10", "k0h1", "k1h0", "kxh2", "k1h2x", "K1H2"}) {
        CHECK_THROWS_AS(EvalConfig::parse(bad), Error);
    }
    const auto list = parse_configs("full,k10h10,,k3hall");
    REQUIRE(list.size() == 3);
    CHECK(list[1].label == "k10h10");
    CHECK_THROWS_AS(parse_configs(","), Error);
}

TEST_CASE("error statistics") {
    const std::vector<double> e{3.0, 1.0, 2.0, 2.0};
    CHECK(mean_squared_error(e) == doctest::Approx((9 + 1 + 4 + 4) / 4.0));
    CHECK(error_quantile(e, 0.5) == 2.0);
    CHECK(error_quantile(e, 0.9) == 3.0);
    CHECK(error_quantile(e, 0.25) == 1.0);
    CHECK(error_quantile(std::vector<double>{4.2}, 0.5) == 4.2);

    const auto cpa = cpa_curve(e);
    REQUIRE(cpa.size() == 3);
    CHECK(cpa[0] == std::pair{1.0, 0.25});
    CHECK(cpa[1] == std::pair{2.0, 0.75});
    CHECK(cpa[2] == std::pair{3.0, 1.0});

    const std::vector<double> zeros(5, 0.0);
    CHECK(mean_squared_error(zeros) == 0.0);
    CHECK(cpa_curve(zeros) == std::vector<std::pair<double, double>>{{0.0, 1.0}});
    CHECK_THROWS_AS(mean_squared_error(std::vector<double>{}), Error);
}

TEST_CASE("spearman with ties") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{5, 6, 7, 8, 7};
    // Ranks of y: 1, 2, 3.5, 5, 3.5.
    CHECK(spearman(x, y) == doctest::Approx(0.8207826816681233));
    const std::vector<double> rev{5, 4, 3, 2, 1};
    CHECK(spearman(x, rev) == doctest::Approx(-1.0));
    const std::vector<double> flat{1, 1, 1, 1, 1};
    CHECK(spearman(x, flat) == 0.0);
    CHECK_THROWS_AS(spearman(x, std::vector<double>{1.0}), Error);
}

TEST_CASE("evaluate reports consistent statistics") {
    auto cfg = fixtures::small_scene(4.0, 4.0, 10, 3);
    const auto scene = make_scene(cfg);
    auto raw = generate_survey(scene);
    raw.roi_bounds = cfg.roi.bounds();
    const auto rfm = grid_interpolate(raw, {2.0, 0.5});
    const auto cache = precompute(rfm, fixtures::fast_precompute(5));
    const auto tests = generate_testset(scene, 12);
    const auto configs = parse_configs("full,k4hall,k2h3,k1h1");
    EvalOptions opt;
    opt.timing_repeats = 2;
    const auto reports = evaluate(cache, tests, configs, opt);
    REQUIRE(reports.size() == 4);

    for (const auto& r : reports) {
        REQUIRE(r.errors.size() == tests.size());
        CHECK(r.mse == doctest::Approx(mean_squared_error(r.errors)));
        CHECK(r.median_error == error_quantile(r.errors, 0.5));
        CHECK(r.cpa.back().second == 1.0);
        CHECK(r.timing.samples == 2 * tests.size());
        CHECK(r.timing.min <= r.timing.mean);
        CHECK(r.timing.mean <= r.timing.max);
        for (std::size_t i = 0; i < tests.size(); ++i) {
            const auto est = r.config.is_full() ? locate_full(cache, tests[i].fingerprint)
                                                : locate(cache, tests[i].fingerprint, *r.config.k, r.config.h);
            CHECK(r.errors[i] == distance(est.coordinates, tests[i].truth));
        }
    }
    CHECK(reports[0].errors == reports[1].errors);
    CHECK(reports[0].predicted_ratio == 1.0);
    CHECK(reports[1].predicted_ratio == 1.0);
    CHECK(reports[0].measured_ratio == 1.0);
    CHECK(reports[2].predicted_ratio == predicted_cost(cache, 2, 3).ratio());

    std::ostringstream csv;
    write_report_csv(csv, reports);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "config,k,h,points,mse,median_error,p90_error,time_mean,time_min,time_max,time_std,predicted_ratio,"
          "measured_ratio");
    std::string row;
    std::getline(lines, row);
    CHECK(row.rfind("full,all,all,12,", 0) == 0);

    std::ostringstream errs;
    write_errors_csv(errs, reports);
    CHECK(errs.str().rfind("point,full,k4hall,k2h3,k1h1\n0,", 0) == 0);

    SUBCASE("mse_vs_h over seeds gives one curve each") {
        const std::vector<std::uint64_t> seeds{1, 2};
        const std::vector<std::size_t> hs{1, 2, 4};
        auto lasso = fixtures::fast_precompute(5).lasso;
        const auto curves = mse_vs_h(cache, rfm, lasso, seeds, tests, hs, 2);
        REQUIRE(curves.size() == 2);
        CHECK(curves[1].seed == 2);
        CHECK(curves[0].h == hs);
        for (double m : curves[0].mse) CHECK(m >= 0.0);
    }
}
