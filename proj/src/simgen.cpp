#include "subloc/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "subloc/error.hpp"

namespace subloc {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
    return std::mt19937_64(seq);
}

constexpr std::uint32_t kApStream = 0;
constexpr std::uint32_t kSurveyStream = 1;
constexpr std::uint32_t kTestStream = 2;

}  // namespace

void SceneConfig::validate() const {
    if (roi.vertices().size() < 3) throw Error("scene needs an RoI polygon");
    if (ap_count < 1) throw Error("scene needs at least one AP");
    if (!(reference_distance > 0.0)) throw Error("reference distance must be positive");
    if (!(shadowing_sigma >= 0.0)) throw Error("shadowing sigma must be non-negative");
    if (!(visibility_cutoff < tx_power)) throw Error("visibility cutoff must be below tx power");
    if (!(walk_spacing > 0.0)) throw Error("walk spacing must be positive");
}

SceneConfig SceneConfig::desk_default() {
    SceneConfig cfg;
    cfg.roi = Polygon({{0, 0}, {16, 0}, {16, 6}, {4, 6}, {4, 16}, {0, 16}});
    return cfg;
}

Scene make_scene(const SceneConfig& cfg) {
    cfg.validate();
    Scene scene{cfg, {}};
    auto rng = stream(cfg.seed, kApStream);
    const Rect b = cfg.roi.bounds();
    std::uniform_real_distribution<double> ux(b.min.x - cfg.ap_margin, b.max.x + cfg.ap_margin);
    std::uniform_real_distribution<double> uy(b.min.y - cfg.ap_margin, b.max.y + cfg.ap_margin);
    for (std::size_t i = 0; i < cfg.ap_count; ++i) {
        char mac[18];
        std::snprintf(mac, sizeof mac, "02:00:00:00:%02zx:%02zx", (i >> 8) & 0xff, i & 0xff);
        const double x = ux(rng);
        const double y = uy(rng);
        scene.access_points.push_back({hash_identifier(mac), {x, y}});
    }
    std::sort(scene.access_points.begin(), scene.access_points.end(),
              [](const auto& a, const auto& b) { return a.key < b.key; });
    return scene;
}

std::optional<double> sample_rss(Point2 ap_position, Point2 user_position, const SceneConfig& cfg,
                                 std::mt19937_64& rng) {
    const double d = std::max(distance(ap_position, user_position), cfg.reference_distance);
    double rss = cfg.tx_power - 10.0 * cfg.path_loss_exponent * std::log10(d / cfg.reference_distance);
    if (cfg.shadowing_sigma > 0.0) rss += std::normal_distribution<double>(0.0, cfg.shadowing_sigma)(rng);
    if (rss < cfg.visibility_cutoff) return std::nullopt;
    return rss;
}

Fingerprint measure(const Scene& scene, Point2 where, std::mt19937_64& rng) {
    std::vector<FeatureKey> keys;
    std::vector<double> values;
    for (const auto& ap : scene.access_points) {
        if (auto v = sample_rss(ap.position, where, scene.config, rng)) {
            keys.push_back(ap.key);
            values.push_back(*v);
        }
    }
    return Fingerprint(std::move(keys), std::move(values));
}

RawRFM generate_survey(const Scene& scene, double walk_spacing) {
    if (!(walk_spacing > 0.0)) throw Error("walk spacing must be positive");
    auto rng = stream(scene.config.seed, kSurveyStream);
    const Rect b = scene.config.roi.bounds();
    const auto lanes = static_cast<std::size_t>(std::floor(b.height() / walk_spacing));
    const auto steps = static_cast<std::size_t>(std::floor(b.width() / walk_spacing));

    RawRFM raw;
    raw.roi_bounds = b;
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        const double y = b.min.y + (static_cast<double>(lane) + 0.5) * walk_spacing;
        for (std::size_t s = 0; s < steps; ++s) {
            const std::size_t i = lane % 2 == 0 ? s : steps - 1 - s;
            const Point2 p{b.min.x + (static_cast<double>(i) + 0.5) * walk_spacing, y};
            if (!scene.config.roi.contains(p)) continue;
            raw.records.push_back({measure(scene, p, rng), p});
        }
    }
    if (raw.records.empty()) throw Error("walk produced no reference data");
    return raw;
}

RawRFM generate_survey(const Scene& scene) { return generate_survey(scene, scene.config.walk_spacing); }

std::vector<TestPoint> generate_testset(const Scene& scene, std::size_t count) {
    auto rng = stream(scene.config.seed, kTestStream);
    const Rect b = scene.config.roi.bounds();
    std::uniform_real_distribution<double> ux(b.min.x, b.max.x);
    std::uniform_real_distribution<double> uy(b.min.y, b.max.y);
    std::vector<TestPoint> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 1000 * (count + 1)) throw Error("no AP is visible inside the RoI");
        const double x = ux(rng);
        const double y = uy(rng);
        const Point2 p{x, y};
        if (!scene.config.roi.contains(p)) continue;
        auto fp = measure(scene, p, rng);
        if (fp.empty()) continue;
        out.push_back({std::move(fp), p});
    }
    return out;
}

}  // namespace subloc
