#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles/oracles.hpp"
#include "support/fixtures.hpp"
#include "subloc/error.hpp"
#include "subloc/io.hpp"
#include "subloc/positioning.hpp"

using namespace subloc;

namespace {

struct Small {
    GriddedRFM rfm;
    PrecomputedCache cache;
    std::vector<TestPoint> tests;
};

Small small_setup(std::uint64_t seed, std::size_t aps = 10, bool full = true) {
    auto cfg = fixtures::small_scene(2.4, 2.4, aps, seed);
    const auto scene = make_scene(cfg);
    auto raw = generate_survey(scene);
    raw.roi_bounds = cfg.roi.bounds();
    Small s;
    s.rfm = grid_interpolate(raw, {1.2, 0.4});
    s.cache = precompute(s.rfm, fixtures::fast_precompute(10, full));
    s.tests = generate_testset(scene, 15);
    return s;
}

PrecomputedCache fake_cache(std::size_t alpha, std::size_t regions, std::size_t keys) {
    PrecomputedCache c;
    c.regions.resize(regions);
    c.key_unions.resize(regions);
    for (auto& r : c.regions) r.candidates.resize(alpha);
    for (std::size_t k = 0; k < keys; ++k) c.roi_key_union.push_back(FeatureKey{k});
    return c;
}

}  // namespace

TEST_CASE("one sub-region: every configuration agrees") {
    const auto rfm = fixtures::synthetic_rfm(1.0, 1.0, {1.0, 0.5}, 2, [](std::size_t k, Point2 p) -> std::optional<double> {
        return -50.0 - 10.0 * k - 5.0 * p.x + 3.0 * p.y;
    });
    const auto cache = precompute(rfm, fixtures::fast_precompute(3));
    REQUIRE(cache.region_count() == 1);
    REQUIRE(cache.candidates_per_region() == 4);
    for (double v : {-90.0, -52.0, -20.0}) {
        const Fingerprint user({FeatureKey{1}, FeatureKey{2}}, {v, v - 10});
        const auto full = locate_full(cache, user);
        const auto all = locate(cache, user, 1, kAllFeatures);
        CHECK(all.coordinates == full.coordinates);
        CHECK(all.log_posterior == full.log_posterior);
        CHECK(full.subregion_index == 0);
        CHECK(locate(cache, user, 1, 5).subregion_index == 0);
    }
}

TEST_CASE("k = N with every feature equals full MAP and the brute-force oracle") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto s = small_setup(seed);
        const std::size_t n = s.cache.region_count();
        REQUIRE(n == 4);
        for (const auto& tp : s.tests) {
            const auto a = locate(s.cache, tp.fingerprint, n, kAllFeatures);
            const auto b = locate_full(s.cache, tp.fingerprint);
            CHECK(a.coordinates == b.coordinates);
            CHECK(a.log_posterior == b.log_posterior);
            CHECK(a.subregion_index == b.subregion_index);

            const auto o = oracle::brute_force_map(s.rfm, tp.fingerprint, s.cache.pooling_radius, s.cache.missing_value,
                                                   s.cache.kde.bandwidth_floor);
            CHECK(b.coordinates == o.where);
            CHECK(b.subregion_index == o.region);
            CHECK(std::abs(b.log_posterior - static_cast<double>(o.log_posterior)) <= 1e-9);
        }
    }
}

TEST_CASE("a feature that is flat over the RFM shifts every score equally") {
    // Key 4 reads −70 everywhere, so it adds the same log density to every
    // candidate: the answer must not move.
    const auto rfm = fixtures::synthetic_rfm(2.0, 2.0, {1.0, 0.25}, 4, [](std::size_t k, Point2 p) -> std::optional<double> {
        if (k == 3) return -70.0;
        const double ax = k == 0 ? 0.0 : (k == 1 ? 2.0 : 1.0);
        const double ay = k == 2 ? 2.0 : 0.0;
        return -35.0 - 25.0 * std::log10(0.3 + std::hypot(p.x - ax, p.y - ay));
    });
    const auto cache = precompute(rfm, fixtures::fast_precompute(5));
    for (double x : {0.2, 0.9, 1.6}) {
        const Fingerprint base({FeatureKey{1}, FeatureKey{2}, FeatureKey{3}},
                               {-35.0 - 25.0 * std::log10(0.3 + std::hypot(x, 0.5)),
                                -35.0 - 25.0 * std::log10(0.3 + std::hypot(x - 2.0, 0.5)),
                                -35.0 - 25.0 * std::log10(0.3 + std::hypot(x - 1.0, 1.5))});
        auto keys = base.keys();
        auto values = base.values();
        keys.push_back(FeatureKey{4});
        values.push_back(-68.5);
        const Fingerprint shifted(keys, values);
        const auto a = locate_full(cache, base);
        const auto b = locate_full(cache, shifted);
        CHECK(a.coordinates == b.coordinates);
        const DensityModel flat{std::vector<double>(1, -70.0), cache.kde.bandwidth_floor};
        CHECK(b.log_posterior - a.log_posterior == doctest::Approx(kde_logpdf(flat, -68.5)).epsilon(1e-9));
    }
}

TEST_CASE("shrinking k cannot raise the posterior while the winner stays selected") {
    const auto s = small_setup(4, 12);
    for (const auto& tp : s.tests) {
        const auto wide = locate(s.cache, tp.fingerprint, 4, 3);
        for (std::size_t k = 1; k < 4; ++k) {
            const auto chosen = select_subregions(s.cache.key_unions, tp.fingerprint.keys(), k);
            const bool kept = std::find(chosen.indices.begin(), chosen.indices.end(), wide.subregion_index) != chosen.indices.end();
            const auto narrow = locate(s.cache, tp.fingerprint, k, 3);
            CHECK(narrow.log_posterior <= wide.log_posterior);
            if (kept) {
                CHECK(narrow.coordinates == wide.coordinates);
                CHECK(narrow.log_posterior == wide.log_posterior);
            }
        }
    }
}

TEST_CASE("locate is deterministic and reports what it used") {
    const auto s = small_setup(5);
    for (const auto& tp : s.tests) {
        const auto a = locate(s.cache, tp.fingerprint, 2, 3);
        const auto b = locate(s.cache, tp.fingerprint, 2, 3);
        CHECK(a.coordinates == b.coordinates);
        CHECK(a.log_posterior == b.log_posterior);
        CHECK(a.used_feature_keys == b.used_feature_keys);
        CHECK(a.used_feature_keys.size() <= 3);
        CHECK(a.region_feature_counts.size() == 2);
        CHECK(a.candidates_scored <= 2 * s.cache.candidates_per_region());
        for (auto key : a.used_feature_keys) CHECK(tp.fingerprint.find(key).has_value());
    }
}

TEST_CASE("errors") {
    const auto s = small_setup(6, 10, false);
    const auto& tp = s.tests.front();
    CHECK_THROWS_WITH_AS(locate(s.cache, Fingerprint{}), "empty fingerprint", Error);
    CHECK_THROWS_AS(locate(s.cache, tp.fingerprint, 2, 0), Error);
    CHECK_THROWS_AS(locate(s.cache, tp.fingerprint, 5, 2), Error);
    CHECK_THROWS_AS(locate_full(s.cache, tp.fingerprint), Error);
    CHECK_THROWS_AS(locate(s.cache, tp.fingerprint, 2, kAllFeatures), Error);
    const Fingerprint stranger({FeatureKey{12345}}, {-50.0});
    CHECK_THROWS_WITH_AS(locate(s.cache, stranger, 4, 3), "no usable features", Error);
}

TEST_CASE("predicted cost") {
    const auto desk = predicted_cost(fake_cache(100, 34, 399), 10, 10);
    CHECK(desk.selected_ops == 100u * 10 * 11);
    CHECK(desk.full_ops == 100u * 34 * 400);
    CHECK(desk.ratio() == doctest::Approx(0.0081).epsilon(0.01));
    CHECK(desk.ratio() == 110.0 / 13600.0);

    const auto same = predicted_cost(fake_cache(100, 34, 399), 34, 399);
    CHECK(same.selected_ops == same.full_ops);
    CHECK(predicted_cost(fake_cache(100, 34, 399), 34, kAllFeatures).ratio() == 1.0);

    const auto doubled = predicted_cost(fake_cache(100, 68, 399), 10, 10);
    CHECK(doubled.selected_ops == desk.selected_ops);
    CHECK(doubled.full_ops == 2 * desk.full_ops);
}

TEST_CASE("cache files round-trip bit-identically") {
    for (bool full : {false, true}) {
        const auto s = small_setup(7, 8, full);
        std::stringstream first;
        write_cache(first, s.cache);
        const auto bytes = first.str();
        std::istringstream in(bytes);
        const auto loaded = read_cache(in);
        CHECK(loaded == s.cache);
        std::ostringstream second;
        write_cache(second, loaded);
        CHECK(second.str() == bytes);

        auto bumped = bytes;
        bumped[8] = static_cast<char>(bumped[8] + 1);
        std::istringstream bad(bumped);
        CHECK_THROWS_WITH_AS(read_cache(bad), "cache format version 2 does not match expected version 1", Error);

        std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(read_cache(truncated), Error);
        std::istringstream trailing(bytes + "x");
        CHECK_THROWS_AS(read_cache(trailing), Error);
        std::istringstream wrong_magic("SUBLOCRF" + bytes.substr(8));
        CHECK_THROWS_AS(read_cache(wrong_magic), Error);
    }
}

TEST_CASE("RFM files round-trip bit-identically") {
    const auto s = small_setup(8);
    std::stringstream first;
    write_rfm(first, s.rfm);
    std::istringstream in(first.str());
    const auto loaded = read_rfm(in);
    CHECK(loaded == s.rfm);
    std::ostringstream second;
    write_rfm(second, loaded);
    CHECK(second.str() == first.str());
}

TEST_CASE("swapping profiles needs a full cache") {
    auto s = small_setup(9, 8, false);
    CHECK_THROWS_AS(s.cache.set_profiles({}), Error);
    auto f = small_setup(9, 8, true);
    CHECK_THROWS_AS(f.cache.set_profiles({}), Error);
    auto cfg = fixtures::fast_precompute(4).lasso;
    cfg.seed = 99;
    f.cache.set_profiles(compute_profiles(f.rfm, cfg));
    CHECK_NOTHROW(f.cache.validate());
}
