#include "subloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "subloc/error.hpp"

namespace subloc {

FeatureKey hash_identifier(std::string_view identifier) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : identifier) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return FeatureKey{h};
}

double distance(Point2 a, Point2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

Fingerprint::Fingerprint(std::vector<FeatureKey> keys, std::vector<double> values)
    : keys_(std::move(keys)), values_(std::move(values)) {
    if (keys_.size() != values_.size()) {
        throw Error("fingerprint has " + std::to_string(keys_.size()) + " keys but " +
                    std::to_string(values_.size()) + " values");
    }
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        if (i > 0 && !(keys_[i - 1] < keys_[i])) {
            if (keys_[i - 1] == keys_[i]) {
                throw Error("duplicate key " + std::to_string(keys_[i].id));
            }
            throw Error("fingerprint keys are not sorted");
        }
        if (!std::isfinite(values_[i])) {
            throw Error("non-finite value for key " + std::to_string(keys_[i].id));
        }
    }
}

Fingerprint Fingerprint::from_pairs(std::vector<std::pair<FeatureKey, double>> pairs) {
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<FeatureKey> keys;
    std::vector<double> values;
    keys.reserve(pairs.size());
    values.reserve(pairs.size());
    for (const auto& [k, v] : pairs) {
        if (!keys.empty() && keys.back() == k) {
            throw Error("duplicate key " + std::to_string(k.id));
        }
        keys.push_back(k);
        values.push_back(v);
    }
    return Fingerprint(std::move(keys), std::move(values));
}

std::optional<double> Fingerprint::find(FeatureKey key) const noexcept {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return std::nullopt;
    return values_[static_cast<std::size_t>(it - keys_.begin())];
}

KeySet key_union(std::span<const ReferenceRecord> records) {
    KeySet out;
    KeySet scratch;
    for (const auto& r : records) {
        const auto& keys = r.fingerprint.keys();
        scratch.clear();
        std::set_union(out.begin(), out.end(), keys.begin(), keys.end(), std::back_inserter(scratch));
        out.swap(scratch);
    }
    return out;
}

KeySet merge_key_sets(std::span<const KeySet> sets) {
    KeySet out;
    KeySet scratch;
    for (const auto& s : sets) {
        scratch.clear();
        std::set_union(out.begin(), out.end(), s.begin(), s.end(), std::back_inserter(scratch));
        out.swap(scratch);
    }
    return out;
}

std::vector<double> feature_vector(const ReferenceRecord& record, std::span<const FeatureKey> keys,
                                   double missing_value) {
    std::vector<double> out(keys.size(), missing_value);
    const auto& rk = record.fingerprint.keys();
    const auto& rv = record.fingerprint.values();
    // Linear merge of two sorted sequences.
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < keys.size() && j < rk.size()) {
        if (keys[i] < rk[j]) {
            ++i;
        } else if (rk[j] < keys[i]) {
            ++j;
        } else {
            out[i] = rv[j];
            ++i;
            ++j;
        }
    }
    return out;
}

KeySet intersect_keys(std::span<const FeatureKey> a, std::span<const FeatureKey> b) {
    KeySet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace subloc
