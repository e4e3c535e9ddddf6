#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "subloc/core.hpp"
#include "subloc/lasso.hpp"

namespace subloc {

struct RelevanceEntry {
    FeatureKey key;
    double frequency = 0.0;

    friend bool operator==(const RelevanceEntry&, const RelevanceEntry&) = default;
};

/// Features of one sub-region ranked by how often randomized LASSO selected
/// them: descending frequency, then ascending key. Never-selected keys are
/// omitted.
struct RelevanceProfile {
    std::vector<RelevanceEntry> entries;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }

    friend bool operator==(const RelevanceProfile&, const RelevanceProfile&) = default;
};

struct RandomizedLassoConfig {
    double sampling_ratio = 0.75;      // ε: fraction of rows drawn (with replacement) per iteration
    std::size_t randomizations = 200;  // T
    double relevance_threshold = 1e-4; // |coefficient| cut for calling a feature selected
    std::uint64_t seed = 0;
    std::size_t cv_folds = 5;
    std::size_t lambda_grid_size = 20;
    double lambda_grid_min_ratio = 1e-3;
    double missing_value = kDefaultMissingValue;
    LassoOptions solver;

    /// Throws subloc::Error when a field is out of range.
    void validate() const;
};

/// Runs T bootstrap LASSO fits on the region and ranks features by selection
/// frequency. Each iteration draws ⌈ε·M⌉ rows with replacement using an RNG
/// seeded from (seed, region index, iteration), so results do not depend on
/// evaluation order.
RelevanceProfile randomized_lasso(const SubRegion& region, const RandomizedLassoConfig& cfg, double lambda);

/// λ chosen by cross validation on the full (non-resampled) region problem.
/// Returns 0 when no feature varies within the region.
double select_region_lambda(const SubRegion& region, const RandomizedLassoConfig& cfg);

/// CV-selected λ followed by randomized_lasso. Empty profile when no feature
/// varies within the region.
RelevanceProfile select_features(const SubRegion& region, const RandomizedLassoConfig& cfg);

/// The first `h` ranked keys that are also in `available` (sorted).
std::vector<FeatureKey> take_relevant(const RelevanceProfile& profile, std::size_t h,
                                      std::span<const FeatureKey> available);

}  // namespace subloc
