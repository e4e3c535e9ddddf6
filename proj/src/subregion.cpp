#include "subloc/subregion.hpp"

#include <algorithm>
#include <string>

#include "subloc/error.hpp"

namespace subloc {

double modified_jaccard(std::span<const FeatureKey> region_keys, std::span<const FeatureKey> user_keys) {
    if (user_keys.empty()) throw Error("empty fingerprint");
    std::size_t common = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < region_keys.size() && j < user_keys.size()) {
        if (region_keys[i] < user_keys[j]) {
            ++i;
        } else if (user_keys[j] < region_keys[i]) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    const auto inter = static_cast<double>(common);
    const auto uni = static_cast<double>(region_keys.size() + user_keys.size() - common);
    return 0.5 * (inter / uni + inter / static_cast<double>(user_keys.size()));
}

std::vector<SubRegionScore> score_subregions(std::span<const KeySet> region_keys,
                                             std::span<const FeatureKey> user_keys) {
    if (user_keys.empty()) throw Error("empty fingerprint");
    std::vector<SubRegionScore> scores(region_keys.size());
    for (std::size_t i = 0; i < region_keys.size(); ++i) {
        scores[i] = {i, modified_jaccard(region_keys[i], user_keys)};
    }
    return scores;
}

CandidateSet select_subregions(std::span<const KeySet> region_keys, std::span<const FeatureKey> user_keys,
                               std::size_t k) {
    if (k == 0 || k > region_keys.size()) {
        throw Error("k must be in [1, " + std::to_string(region_keys.size()) + "], got " + std::to_string(k));
    }
    auto scores = score_subregions(region_keys, user_keys);
    auto better = [](const SubRegionScore& a, const SubRegionScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    };
    std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), scores.end(), better);

    CandidateSet out;
    out.indices.reserve(k);
    out.scores.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.indices.push_back(scores[i].index);
        out.scores.push_back(scores[i].score);
    }
    return out;
}

CandidateSet select_subregions(const GriddedRFM& rfm, const Fingerprint& user, std::size_t k) {
    std::vector<KeySet> keys;
    keys.reserve(rfm.sub_regions.size());
    for (const auto& r : rfm.sub_regions) keys.push_back(r.key_union);
    return select_subregions(keys, user.keys(), k);
}

}  // namespace subloc
