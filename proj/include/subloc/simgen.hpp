#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "subloc/core.hpp"
#include "subloc/rfm.hpp"

namespace subloc {

/// Parameters of a synthetic WLAN scene: APs scattered around the RoI, RSS
/// from a log-distance path-loss model with i.i.d. lognormal shadowing.
struct SceneConfig {
    Polygon roi;
    std::size_t ap_count = 100;
    double tx_power = -45.0;          // dBm at reference_distance
    double path_loss_exponent = 5.0;
    double reference_distance = 1.0;  // meters
    double shadowing_sigma = 5.0;     // dB
    double visibility_cutoff = -82.0; // dBm; weaker readings are not observed
    double ap_margin = 3.0;           // APs are placed over the RoI bounds grown by this much
    std::uint64_t seed = 1;
    double walk_spacing = 0.26;       // survey sample pitch along the walk, meters
    std::size_t test_count = 500;

    void validate() const;

    /// ~136 m² L-shaped floor of 34 cells of 2×2 m, 100 APs, ~2000 survey
    /// records and 500 test points.
    static SceneConfig desk_default();
};

struct AccessPoint {
    FeatureKey key;
    Point2 position;
};

struct Scene {
    SceneConfig config;
    std::vector<AccessPoint> access_points;  // sorted by key
};

struct TestPoint {
    Fingerprint fingerprint;
    Point2 truth;
};

/// Places the APs uniformly over the grown RoI bounds (seeded).
Scene make_scene(const SceneConfig& cfg);

/// One RSS draw; std::nullopt when it falls below the visibility cutoff.
std::optional<double> sample_rss(Point2 ap_position, Point2 user_position, const SceneConfig& cfg,
                                 std::mt19937_64& rng);

/// Fingerprint of every AP visible at `where`.
Fingerprint measure(const Scene& scene, Point2 where, std::mt19937_64& rng);

/// Survey records along a serpentine walk with `walk_spacing` between both
/// samples and lanes, restricted to the RoI polygon.
RawRFM generate_survey(const Scene& scene, double walk_spacing);
RawRFM generate_survey(const Scene& scene);

/// Test points uniform over the RoI polygon, each with a non-empty fingerprint.
std::vector<TestPoint> generate_testset(const Scene& scene, std::size_t count);

/// Reads a scene description in TOML; missing fields keep desk defaults.
SceneConfig load_scene_config(const std::filesystem::path& path);
SceneConfig parse_scene_config(std::string_view toml_text);

}  // namespace subloc
