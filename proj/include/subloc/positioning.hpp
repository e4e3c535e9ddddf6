#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "subloc/core.hpp"
#include "subloc/density.hpp"
#include "subloc/feature_select.hpp"
#include "subloc/rfm.hpp"
#include "subloc/subregion.hpp"

namespace subloc {

/// Number of features used per candidate sub-region online. std::nullopt
/// means every user feature present anywhere in the RFM, with no relevance
/// filtering.
using FeatureBudget = std::optional<std::size_t>;
inline constexpr FeatureBudget kAllFeatures = std::nullopt;
inline constexpr std::size_t kDefaultFeatureCount = 10;

struct PrecomputeConfig {
    RandomizedLassoConfig lasso;
    KdeConfig kde;
    /// Fit density models for every RoI key at each candidate instead of only
    /// the relevant ones. Needed by locate_full and by FeatureBudget = all.
    bool full_cache = false;
    /// Radius of the lattice neighborhood whose values train each density
    /// model; defaults to half the cell size.
    std::optional<double> pooling_radius;
};

/// Everything the online stage needs for one sub-region.
struct RegionCache {
    std::size_t index = 0;
    Rect bounds;
    RelevanceProfile profile;
    std::vector<Point2> candidates;
    KeySet model_keys;                // keys with a density model at every candidate
    std::vector<DensityModel> models; // candidates.size() × model_keys.size(), candidate-major

    const DensityModel& model(std::size_t candidate, std::size_t key_slot) const {
        return models[candidate * model_keys.size() + key_slot];
    }

    friend bool operator==(const RegionCache&, const RegionCache&) = default;
};

struct PrecomputedCache {
    static constexpr std::uint32_t kFormatVersion = 1;

    GridSpec grid;
    double missing_value = kDefaultMissingValue;
    double pooling_radius = 1.0;
    KdeConfig kde;
    bool full = false;
    KeySet roi_key_union;
    std::vector<KeySet> key_unions;  // aligned with regions
    std::vector<RegionCache> regions;

    std::size_t region_count() const noexcept { return regions.size(); }
    /// α: candidate locations per sub-region.
    std::size_t candidates_per_region() const noexcept {
        return regions.empty() ? 0 : regions.front().candidates.size();
    }

    /// Replaces every relevance profile; only valid on a full cache since the
    /// new profiles may name keys without a fitted model otherwise.
    void set_profiles(std::vector<RelevanceProfile> profiles);

    /// Throws subloc::Error if any structural invariant is violated.
    void validate() const;

    friend bool operator==(const PrecomputedCache&, const PrecomputedCache&) = default;
};

struct PositionEstimate {
    Point2 coordinates;
    double log_posterior = 0.0;
    std::size_t subregion_index = 0;
    std::vector<FeatureKey> used_feature_keys;  // of the winning sub-region
    std::size_t candidates_scored = 0;
    /// (sub-region index, features used) for each searched sub-region.
    std::vector<std::pair<std::size_t, std::size_t>> region_feature_counts;
};

/// Relevance profile of every sub-region, in sub-region order.
std::vector<RelevanceProfile> compute_profiles(const GriddedRFM& rfm, const RandomizedLassoConfig& cfg);

/// Builds the online cache from precomputed profiles.
PrecomputedCache build_cache(const GriddedRFM& rfm, std::vector<RelevanceProfile> profiles,
                             const PrecomputeConfig& cfg);

/// compute_profiles + build_cache.
PrecomputedCache precompute(const GriddedRFM& rfm, const PrecomputeConfig& cfg);

/// MAP position over the candidate locations of the k sub-regions most similar
/// to the user fingerprint, using up to h relevant features per sub-region.
/// Ties go to the lower sub-region index, then the smaller coordinates.
/// Throws subloc::Error("no usable features") when no candidate sub-region
/// shares a usable feature with the fingerprint.
PositionEstimate locate(const PrecomputedCache& cache, const Fingerprint& user,
                        std::size_t k = kDefaultCandidateRegions, FeatureBudget h = kDefaultFeatureCount);

/// MAP over every sub-region with every user feature the RFM knows. Needs a
/// full cache.
PositionEstimate locate_full(const PrecomputedCache& cache, const Fingerprint& user);

struct CostEstimate {
    std::uint64_t selected_ops = 0;  // α·k·(h+1)
    std::uint64_t full_ops = 0;      // α·N·(|RoI keys|+1)

    double ratio() const noexcept {
        return full_ops == 0 ? 0.0 : static_cast<double>(selected_ops) / static_cast<double>(full_ops);
    }
};

CostEstimate predicted_cost(const PrecomputedCache& cache, std::size_t k, FeatureBudget h);

}  // namespace subloc
