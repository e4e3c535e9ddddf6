#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subloc/core.hpp"

namespace subloc {

/// Default number of candidate sub-regions kept online.
inline constexpr std::size_t kDefaultCandidateRegions = 10;

struct SubRegionScore {
    std::size_t index = 0;
    double score = 0.0;
};

/// Top-k sub-regions by descending modified Jaccard score, ties by ascending index.
struct CandidateSet {
    std::vector<std::size_t> indices;
    std::vector<double> scores;

    std::size_t size() const noexcept { return indices.size(); }
};

/// Modified Jaccard index between a sub-region's key set A and the user's key
/// set B: the mean of |A∩B|/|A∪B| and |A∩B|/|B|. The second term rewards
/// regions that contain most of what the user observed.
/// Throws subloc::Error("empty fingerprint") when B is empty.
double modified_jaccard(std::span<const FeatureKey> region_keys, std::span<const FeatureKey> user_keys);

/// Scores every region key set against `user_keys`.
std::vector<SubRegionScore> score_subregions(std::span<const KeySet> region_keys,
                                             std::span<const FeatureKey> user_keys);

/// The k highest-scoring regions. Throws if k is 0 or exceeds the region count.
CandidateSet select_subregions(std::span<const KeySet> region_keys, std::span<const FeatureKey> user_keys,
                               std::size_t k);

CandidateSet select_subregions(const GriddedRFM& rfm, const Fingerprint& user, std::size_t k);

}  // namespace subloc
