#include "subloc/rfm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "subloc/error.hpp"

namespace subloc {

namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;

BgPolygon to_boost(const std::vector<Point2>& vertices) {
    BgPolygon poly;
    for (const auto& v : vertices) bg::append(poly.outer(), BgPoint(v.x, v.y));
    bg::correct(poly);
    return poly;
}

std::size_t cells_along(double extent, double cell_size) {
    // Relative slack so that e.g. 16.0 / 2.0 is not rounded up to 9 cells.
    const double n = std::ceil(extent / cell_size - 1e-9);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

}  // namespace

std::size_t GridSpec::points_per_edge() const {
    if (!(cell_size > 0.0) || !(grid_spacing > 0.0)) {
        throw Error("cell size and grid spacing must be positive");
    }
    const double ratio = cell_size / grid_spacing;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
        throw Error("cell size must be an integer multiple of grid spacing");
    }
    return static_cast<std::size_t>(rounded);
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw Error("polygon needs at least 3 vertices");
    if (!(area() > 0.0)) throw Error("polygon has zero area");
}

bool Polygon::contains(Point2 p) const {
    return bg::within(BgPoint(p.x, p.y), to_boost(vertices_));
}

double Polygon::area() const { return std::abs(bg::area(to_boost(vertices_))); }

Rect Polygon::bounds() const {
    Rect r{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
           {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const auto& v : vertices_) {
        r.min.x = std::min(r.min.x, v.x);
        r.min.y = std::min(r.min.y, v.y);
        r.max.x = std::max(r.max.x, v.x);
        r.max.y = std::max(r.max.y, v.y);
    }
    return r;
}

Rect bounding_box(const std::vector<ReferenceRecord>& records) {
    if (records.empty()) throw Error("no reference data");
    Rect r{records.front().position, records.front().position};
    for (const auto& rec : records) {
        r.min.x = std::min(r.min.x, rec.position.x);
        r.min.y = std::min(r.min.y, rec.position.y);
        r.max.x = std::max(r.max.x, rec.position.x);
        r.max.y = std::max(r.max.y, rec.position.y);
    }
    return r;
}

GriddedRFM grid_interpolate(const RawRFM& raw, const GridSpec& spec, const std::optional<Polygon>& mask) {
    if (raw.records.empty()) throw Error("no reference data");
    const std::size_t per_edge = spec.points_per_edge();
    for (const auto& r : raw.records) {
        if (!raw.roi_bounds.contains(r.position)) throw Error("reference record outside RoI bounds");
    }

    const Point2 origin = raw.roi_bounds.min;
    const std::size_t cols = cells_along(raw.roi_bounds.width(), spec.cell_size);
    const std::size_t rows = cells_along(raw.roi_bounds.height(), spec.cell_size);

    auto nearest = [&](Point2 p) -> const ReferenceRecord& {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < raw.records.size(); ++i) {
            const double dx = raw.records[i].position.x - p.x;
            const double dy = raw.records[i].position.y - p.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        return raw.records[best];
    };

    GriddedRFM out;
    out.cell_size = spec.cell_size;
    out.grid_spacing = spec.grid_spacing;

    for (std::size_t row = 0; row < rows; ++row) {
        for (std::size_t col = 0; col < cols; ++col) {
            SubRegion region;
            region.bounds.min = {origin.x + static_cast<double>(col) * spec.cell_size,
                                 origin.y + static_cast<double>(row) * spec.cell_size};
            region.bounds.max = {origin.x + static_cast<double>(col + 1) * spec.cell_size,
                                 origin.y + static_cast<double>(row + 1) * spec.cell_size};
            if (mask && !mask->contains(region.bounds.center())) continue;

            region.reference_points.reserve(per_edge * per_edge);
            for (std::size_t j = 0; j < per_edge; ++j) {
                for (std::size_t i = 0; i < per_edge; ++i) {
                    const std::size_t gx = col * per_edge + i;
                    const std::size_t gy = row * per_edge + j;
                    const Point2 p{origin.x + (static_cast<double>(gx) + 0.5) * spec.grid_spacing,
                                   origin.y + (static_cast<double>(gy) + 0.5) * spec.grid_spacing};
                    region.reference_points.push_back({nearest(p).fingerprint, p});
                }
            }
            region.index = out.sub_regions.size();
            region.key_union = key_union(region.reference_points);
            out.sub_regions.push_back(std::move(region));
        }
    }
    if (out.sub_regions.empty()) throw Error("mask excludes every sub-region");

    std::vector<KeySet> unions;
    unions.reserve(out.sub_regions.size());
    for (const auto& r : out.sub_regions) unions.push_back(r.key_union);
    out.roi_key_union = merge_key_sets(unions);
    return out;
}

RawRFM as_raw(const GriddedRFM& rfm) {
    RawRFM raw;
    bool first = true;
    for (const auto& region : rfm.sub_regions) {
        for (const auto& p : region.reference_points) raw.records.push_back(p);
        if (first) {
            raw.roi_bounds = region.bounds;
            first = false;
        } else {
            raw.roi_bounds.min.x = std::min(raw.roi_bounds.min.x, region.bounds.min.x);
            raw.roi_bounds.min.y = std::min(raw.roi_bounds.min.y, region.bounds.min.y);
            raw.roi_bounds.max.x = std::max(raw.roi_bounds.max.x, region.bounds.max.x);
            raw.roi_bounds.max.y = std::max(raw.roi_bounds.max.y, region.bounds.max.y);
        }
    }
    if (raw.records.empty()) throw Error("no reference data");
    return raw;
}

}  // namespace subloc
