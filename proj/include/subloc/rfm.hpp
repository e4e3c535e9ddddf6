#pragma once

#include <optional>
#include <vector>

#include "subloc/core.hpp"

namespace subloc {

/// Survey data collected at arbitrary positions inside `roi_bounds`.
struct RawRFM {
    std::vector<ReferenceRecord> records;
    Rect roi_bounds;
};

struct GridSpec {
    double cell_size = 2.0;     // sub-region edge, meters
    double grid_spacing = 0.2;  // lattice pitch, meters

    /// Lattice points along one sub-region edge. Throws subloc::Error unless
    /// both sizes are positive and cell_size is an integer multiple of
    /// grid_spacing.
    std::size_t points_per_edge() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Simple polygon given by its vertices (either orientation, implicitly closed).
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    bool contains(Point2 p) const;
    double area() const;
    Rect bounds() const;

private:
    std::vector<Point2> vertices_;
};

/// Bounding box of the record positions.
Rect bounding_box(const std::vector<ReferenceRecord>& records);

/// Densifies `raw` to a regular lattice by nearest-neighbor assignment of whole
/// fingerprints and partitions it into square sub-regions.
///
/// The lattice is anchored at roi_bounds.min with points at the centres of
/// grid_spacing cells. Sub-regions of edge cell_size tile the bounds (the last
/// row/column may extend past roi_bounds.max) and are indexed row-major. When
/// a mask is given, only sub-regions whose centre lies inside it are kept, each
/// with all of its lattice points so every sub-region has the same count.
/// Distance ties go to the lowest record index.
GriddedRFM grid_interpolate(const RawRFM& raw, const GridSpec& spec,
                            const std::optional<Polygon>& mask = std::nullopt);

/// Treats every lattice point of `rfm` as a raw record (used to re-grid).
RawRFM as_raw(const GriddedRFM& rfm);

}  // namespace subloc
