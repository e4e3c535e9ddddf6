#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "subloc/core.hpp"
#include "subloc/positioning.hpp"
#include "subloc/rfm.hpp"
#include "subloc/simgen.hpp"

namespace fixtures {

using namespace subloc;

// Rectangular scene of w×h meters with strong, widely visible APs.
inline SceneConfig small_scene(double w, double h, std::size_t aps, std::uint64_t seed) {
    SceneConfig cfg;
    cfg.roi = Polygon({{0, 0}, {w, 0}, {w, h}, {0, h}});
    cfg.ap_count = aps;
    cfg.tx_power = -35.0;
    cfg.path_loss_exponent = 3.0;
    cfg.shadowing_sigma = 3.0;
    cfg.visibility_cutoff = -90.0;
    cfg.ap_margin = 2.0;
    cfg.seed = seed;
    cfg.walk_spacing = 0.25;
    cfg.test_count = 20;
    return cfg;
}

// Gridded RFM whose lattice value for key `k` at p is value(k, p), or missing
// when it returns std::nullopt.
inline GriddedRFM synthetic_rfm(double w, double h, const GridSpec& spec, std::size_t keys,
                                const std::function<std::optional<double>(std::size_t, Point2)>& value) {
    RawRFM raw;
    raw.roi_bounds = {{0, 0}, {w, h}};
    const double s = spec.grid_spacing;
    const auto nx = static_cast<int>(std::lround(w / s));
    const auto ny = static_cast<int>(std::lround(h / s));
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double x = (ix + 0.5) * s;
            const double y = (iy + 0.5) * s;
            std::vector<std::pair<FeatureKey, double>> pairs;
            for (std::size_t k = 0; k < keys; ++k) {
                if (auto v = value(k, {x, y})) pairs.emplace_back(FeatureKey{k + 1}, *v);
            }
            raw.records.push_back({Fingerprint::from_pairs(std::move(pairs)), {x, y}});
        }
    }
    return grid_interpolate(raw, spec);
}

inline PrecomputeConfig fast_precompute(std::size_t t = 20, bool full = true) {
    PrecomputeConfig cfg;
    cfg.lasso.randomizations = t;
    cfg.full_cache = full;
    return cfg;
}

}  // namespace fixtures
