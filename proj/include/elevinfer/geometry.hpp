#pragma once

#include <vector>

#include "elevinfer/types.hpp"

namespace elev {

// Componentwise min/max box over the profile's coordinates.
// Throws DataError when coords are absent.
BoundingRect tight_rect(const ElevationProfile& profile);

// Intersection-over-union with planar degree areas. Identical zero-area
// points compare as 1; any other zero-area union case is 0.
double rect_iou(const BoundingRect& a, const BoundingRect& b);

// Mutable registry behind assign_region. Region centers are fixed at the
// first rectangle's center; later members only extend the bounds union.
class RegionRegistry {
public:
    // Nearest region whose center is within threshold (degrees) of the
    // rect's center; ties go to the lowest id. Creates a region otherwise.
    RegionId assign(const BoundingRect& rect, double threshold);

    const std::vector<Region>& regions() const { return regions_; }
    Region& region(RegionId id) { return regions_.at(static_cast<std::size_t>(id)); }

    // Region centers must lie inside their members' bounds union.
    void check_invariants() const;

private:
    std::vector<Region> regions_;
    std::vector<BoundingRect> bounds_union_;  // per region, over member rects
};

// Mean rect IoU over unordered same-label sample pairs; 0 when no such
// pair exists. All samples must carry coords.
double avg_overlap(const Dataset& dataset);

}  // namespace elev
