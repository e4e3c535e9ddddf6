#include "subloc/positioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subloc/error.hpp"
#include "subloc/subregion.hpp"

namespace subloc {

namespace {

double rect_distance(const Rect& r, Point2 p) noexcept {
    const double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
    const double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
    return std::hypot(dx, dy);
}

struct Best {
    double score = -std::numeric_limits<double>::infinity();
    std::size_t region = 0;
    std::size_t region_slot = 0;
    Point2 where;
    bool found = false;

    void offer(double s, std::size_t region_index, std::size_t slot, Point2 p) {
        bool take = !found || s > score;
        if (found && s == score) {
            take = region_index < region || (region_index == region && p < where);
        }
        if (take) {
            score = s;
            region = region_index;
            region_slot = slot;
            where = p;
            found = true;
        }
    }
};

// Naive-Bayes log posterior (uniform prior dropped) of every candidate in one
// region, offered to `best`. Returns false if the region has no features.
bool score_region(const RegionCache& rc, const Fingerprint& user, const std::vector<FeatureKey>& keys,
                  std::size_t slot, Best& best) {
    if (keys.empty()) return false;
    std::vector<std::size_t> columns(keys.size());
    std::vector<double> values(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto it = std::lower_bound(rc.model_keys.begin(), rc.model_keys.end(), keys[i]);
        if (it == rc.model_keys.end() || *it != keys[i]) {
            throw Error("cache has no density model for key " + std::to_string(keys[i].id) +
                        " in sub-region " + std::to_string(rc.index) + " (rebuild with a full cache)");
        }
        columns[i] = static_cast<std::size_t>(it - rc.model_keys.begin());
        values[i] = *user.find(keys[i]);
    }
    for (std::size_t c = 0; c < rc.candidates.size(); ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < keys.size(); ++i) s += kde_logpdf(rc.model(c, columns[i]), values[i]);
        best.offer(s, rc.index, slot, rc.candidates[c]);
    }
    return true;
}

std::vector<FeatureKey> region_keys(const PrecomputedCache& cache, std::size_t slot, const Fingerprint& user,
                                    FeatureBudget h) {
    // Unbounded: every user key the RFM knows, so all candidates are scored on
    // the same features and the term count does not vary across sub-regions.
    if (!h) return intersect_keys(user.keys(), cache.roi_key_union);
    return take_relevant(cache.regions[slot].profile, *h, intersect_keys(user.keys(), cache.key_unions[slot]));
}

PositionEstimate search(const PrecomputedCache& cache, const Fingerprint& user,
                        const std::vector<std::size_t>& slots, FeatureBudget h) {
    Best best;
    PositionEstimate est;
    std::vector<std::vector<FeatureKey>> used(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const std::size_t slot = slots[i];
        used[i] = region_keys(cache, slot, user, h);
        est.region_feature_counts.emplace_back(cache.regions[slot].index, used[i].size());
        if (score_region(cache.regions[slot], user, used[i], i, best)) {
            est.candidates_scored += cache.regions[slot].candidates.size();
        }
    }
    if (!best.found) throw Error("no usable features");
    est.coordinates = best.where;
    est.log_posterior = best.score;
    est.subregion_index = best.region;
    est.used_feature_keys = std::move(used[best.region_slot]);
    return est;
}

}  // namespace

void PrecomputedCache::set_profiles(std::vector<RelevanceProfile> profiles) {
    if (!full) throw Error("replacing profiles requires a full cache");
    if (profiles.size() != regions.size()) throw Error("profile count does not match sub-region count");
    for (std::size_t i = 0; i < regions.size(); ++i) regions[i].profile = std::move(profiles[i]);
    validate();
}

void PrecomputedCache::validate() const {
    if (key_unions.size() != regions.size()) throw Error("cache key sets do not match sub-regions");
    const std::size_t alpha = candidates_per_region();
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const auto& rc = regions[i];
        const auto& ku = key_unions[i];
        if (!std::is_sorted(ku.begin(), ku.end())) throw Error("cache key set is not sorted");
        if (rc.candidates.size() != alpha) throw Error("sub-regions have unequal candidate counts");
        for (const auto& e : rc.profile.entries) {
            if (!std::binary_search(ku.begin(), ku.end(), e.key)) {
                throw Error("relevance profile key " + std::to_string(e.key.id) + " outside sub-region key set");
            }
            if (!(e.frequency >= 0.0 && e.frequency <= 1.0)) throw Error("relevance frequency out of range");
        }
        for (const auto& p : rc.candidates) {
            if (!rc.bounds.contains(p)) throw Error("candidate location outside its sub-region");
        }
        if (rc.models.size() != rc.candidates.size() * rc.model_keys.size()) {
            throw Error("density model table has wrong size");
        }
        for (const auto& m : rc.models) {
            if (m.centers.empty() || !(m.bandwidth > 0.0)) throw Error("invalid density model");
        }
        if (full && rc.model_keys != roi_key_union) throw Error("full cache lacks models for some keys");
    }
}

std::vector<RelevanceProfile> compute_profiles(const GriddedRFM& rfm, const RandomizedLassoConfig& cfg) {
    std::vector<RelevanceProfile> out;
    out.reserve(rfm.sub_regions.size());
    for (const auto& region : rfm.sub_regions) out.push_back(select_features(region, cfg));
    return out;
}

PrecomputedCache build_cache(const GriddedRFM& rfm, std::vector<RelevanceProfile> profiles,
                             const PrecomputeConfig& cfg) {
    if (rfm.sub_regions.empty()) throw Error("no reference data");
    if (profiles.size() != rfm.sub_regions.size()) throw Error("profile count does not match sub-region count");

    PrecomputedCache cache;
    cache.grid = GridSpec{rfm.cell_size, rfm.grid_spacing};
    cache.missing_value = cfg.lasso.missing_value;
    cache.pooling_radius = cfg.pooling_radius.value_or(rfm.cell_size / 2.0);
    if (!(cache.pooling_radius >= 0.0)) throw Error("pooling radius must be non-negative");
    cache.kde = cfg.kde;
    cache.full = cfg.full_cache;
    cache.roi_key_union = rfm.roi_key_union;

    // Dense value table over the RoI key set, one row per lattice point.
    const std::size_t nkeys = rfm.roi_key_union.size();
    std::vector<std::vector<double>> dense(rfm.sub_regions.size());
    for (std::size_t r = 0; r < rfm.sub_regions.size(); ++r) {
        for (const auto& p : rfm.sub_regions[r].reference_points) {
            auto f = feature_vector(p, rfm.roi_key_union, cache.missing_value);
            dense[r].insert(dense[r].end(), f.begin(), f.end());
        }
    }
    const double reach = cache.pooling_radius * (1.0 + 1e-12);

    for (std::size_t r = 0; r < rfm.sub_regions.size(); ++r) {
        const auto& region = rfm.sub_regions[r];
        RegionCache rc;
        rc.index = region.index;
        rc.bounds = region.bounds;
        rc.profile = std::move(profiles[r]);
        for (const auto& e : rc.profile.entries) {
            if (!std::binary_search(region.key_union.begin(), region.key_union.end(), e.key)) {
                throw Error("relevance profile key outside sub-region key set");
            }
        }
        if (cfg.full_cache) {
            rc.model_keys = rfm.roi_key_union;
        } else {
            for (const auto& e : rc.profile.entries) rc.model_keys.push_back(e.key);
            std::sort(rc.model_keys.begin(), rc.model_keys.end());
        }
        std::vector<std::size_t> columns;
        columns.reserve(rc.model_keys.size());
        for (auto k : rc.model_keys) {
            columns.push_back(static_cast<std::size_t>(
                std::lower_bound(rfm.roi_key_union.begin(), rfm.roi_key_union.end(), k) -
                rfm.roi_key_union.begin()));
        }

        rc.candidates.reserve(region.reference_points.size());
        rc.models.reserve(region.reference_points.size() * rc.model_keys.size());
        std::vector<const double*> neighbors;
        std::vector<double> values;
        for (const auto& cand : region.reference_points) {
            rc.candidates.push_back(cand.position);
            neighbors.clear();
            for (std::size_t o = 0; o < rfm.sub_regions.size(); ++o) {
                const auto& other = rfm.sub_regions[o];
                if (rect_distance(other.bounds, cand.position) > reach) continue;
                for (std::size_t j = 0; j < other.reference_points.size(); ++j) {
                    if (distance(other.reference_points[j].position, cand.position) <= reach) {
                        neighbors.push_back(dense[o].data() + j * nkeys);
                    }
                }
            }
            for (std::size_t col : columns) {
                values.clear();
                for (const double* row : neighbors) values.push_back(row[col]);
                rc.models.push_back(kde_fit(values, cfg.kde));
            }
        }
        cache.key_unions.push_back(region.key_union);
        cache.regions.push_back(std::move(rc));
    }
    cache.validate();
    return cache;
}

PrecomputedCache precompute(const GriddedRFM& rfm, const PrecomputeConfig& cfg) {
    return build_cache(rfm, compute_profiles(rfm, cfg.lasso), cfg);
}

PositionEstimate locate(const PrecomputedCache& cache, const Fingerprint& user, std::size_t k, FeatureBudget h) {
    if (user.empty()) throw Error("empty fingerprint");
    if (h && *h == 0) throw Error("h must be at least 1");
    const auto chosen = select_subregions(cache.key_unions, user.keys(), k);
    return search(cache, user, chosen.indices, h);
}

PositionEstimate locate_full(const PrecomputedCache& cache, const Fingerprint& user) {
    if (user.empty()) throw Error("empty fingerprint");
    if (!cache.full) throw Error("locate_full needs a full cache");
    std::vector<std::size_t> all(cache.regions.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return search(cache, user, all, kAllFeatures);
}

CostEstimate predicted_cost(const PrecomputedCache& cache, std::size_t k, FeatureBudget h) {
    const std::uint64_t alpha = cache.candidates_per_region();
    const std::uint64_t n = cache.region_count();
    const std::uint64_t keys = cache.roi_key_union.size();
    const std::uint64_t used = h ? *h : keys;
    return {alpha * k * (used + 1), alpha * n * (keys + 1)};
}

}  // namespace subloc
