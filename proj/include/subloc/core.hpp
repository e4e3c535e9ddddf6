#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace subloc {

/// RSS value substituted for features that are not observed at a location.
/// Lower than any observable WLAN reading.
inline constexpr double kDefaultMissingValue = -110.0;

/// Identifier of one observable feature (for WLAN: a hashed AP MAC address).
struct FeatureKey {
    std::uint64_t id = 0;

    friend constexpr auto operator<=>(const FeatureKey&, const FeatureKey&) = default;
};

/// Stable 64-bit FNV-1a hash of a feature identifier. The same identifier maps
/// to the same key on every run and platform.
FeatureKey hash_identifier(std::string_view identifier) noexcept;

/// Sorted, duplicate-free set of feature keys.
using KeySet = std::vector<FeatureKey>;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr auto operator<=>(const Point2&, const Point2&) = default;
};

double distance(Point2 a, Point2 b) noexcept;

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
    Point2 min;
    Point2 max;

    bool contains(Point2 p) const noexcept {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    Point2 center() const noexcept { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }
    double width() const noexcept { return max.x - min.x; }
    double height() const noexcept { return max.y - min.y; }

    friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// Associative array of (key, value) observations at one location, stored as
/// two parallel vectors with strictly increasing keys.
class Fingerprint {
public:
    Fingerprint() = default;

    /// Takes parallel key/value vectors. Throws subloc::Error if keys are not
    /// strictly increasing, lengths differ, or a value is not finite.
    Fingerprint(std::vector<FeatureKey> keys, std::vector<double> values);

    /// Builds from unordered pairs; throws on a duplicate key (naming it).
    static Fingerprint from_pairs(std::vector<std::pair<FeatureKey, double>> pairs);

    const std::vector<FeatureKey>& keys() const noexcept { return keys_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }

    std::optional<double> find(FeatureKey key) const noexcept;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

private:
    std::vector<FeatureKey> keys_;
    std::vector<double> values_;
};

struct ReferenceRecord {
    Fingerprint fingerprint;
    Point2 position;

    friend bool operator==(const ReferenceRecord&, const ReferenceRecord&) = default;
};

struct SubRegion {
    std::size_t index = 0;
    Rect bounds;
    std::vector<ReferenceRecord> reference_points;
    KeySet key_union;

    friend bool operator==(const SubRegion&, const SubRegion&) = default;
};

/// Reference fingerprint map densified to a regular lattice and partitioned
/// into equally populated square sub-regions.
struct GriddedRFM {
    std::vector<SubRegion> sub_regions;
    double cell_size = 0.0;
    double grid_spacing = 0.0;
    KeySet roi_key_union;

    /// Number of lattice points per sub-region (equal for all sub-regions).
    std::size_t points_per_region() const noexcept {
        return sub_regions.empty() ? 0 : sub_regions.front().reference_points.size();
    }

    friend bool operator==(const GriddedRFM&, const GriddedRFM&) = default;
};

/// Union of the keys of all fingerprints.
KeySet key_union(std::span<const ReferenceRecord> records);

/// Union of several sorted key sets.
KeySet merge_key_sets(std::span<const KeySet> sets);

/// Dense vector aligned with `keys`: the record's value where it observed the
/// key, `missing_value` elsewhere. Record keys outside `keys` are dropped.
std::vector<double> feature_vector(const ReferenceRecord& record, std::span<const FeatureKey> keys,
                                   double missing_value);

/// Intersection of two sorted key sets.
KeySet intersect_keys(std::span<const FeatureKey> a, std::span<const FeatureKey> b);

}  // namespace subloc

template <>
struct std::hash<subloc::FeatureKey> {
    std::size_t operator()(const subloc::FeatureKey& k) const noexcept {
        return std::hash<std::uint64_t>{}(k.id);
    }
};
