#include "elevinfer/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elevinfer/error.hpp"

namespace elev {

BoundingRect tight_rect(const ElevationProfile& profile) {
    if (!profile.coords || profile.coords->empty()) {
        throw DataError("tight_rect: profile '" + profile.source_id + "' carries no coordinates");
    }
    BoundingRect rect{(*profile.coords)[0], (*profile.coords)[0]};
    for (const LatLon& p : *profile.coords) {
        rect.sw.lat = std::min(rect.sw.lat, p.lat);
        rect.sw.lon = std::min(rect.sw.lon, p.lon);
        rect.ne.lat = std::max(rect.ne.lat, p.lat);
        rect.ne.lon = std::max(rect.ne.lon, p.lon);
    }
    return rect;
}

double rect_iou(const BoundingRect& a, const BoundingRect& b) {
    const double iw = std::min(a.ne.lon, b.ne.lon) - std::max(a.sw.lon, b.sw.lon);
    const double ih = std::min(a.ne.lat, b.ne.lat) - std::max(a.sw.lat, b.sw.lat);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        const bool identical_points = a.sw == a.ne && a == b;
        return identical_points ? 1.0 : 0.0;
    }
    return inter / uni;
}

RegionId RegionRegistry::assign(const BoundingRect& rect, double threshold) {
    if (threshold <= 0.0) throw UsageError("assign_region: threshold must be positive");
    const LatLon c = rect.center();

    RegionId best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const Region& r : regions_) {
        const double d = std::hypot(r.center.lat - c.lat, r.center.lon - c.lon);
        if (d <= threshold && d < best_dist) {  // strict < keeps the lowest id on ties
            best = r.id;
            best_dist = d;
        }
    }
    if (best >= 0) {
        auto i = static_cast<std::size_t>(best);
        regions_[i].member_count += 1;
        bounds_union_[i].sw.lat = std::min(bounds_union_[i].sw.lat, rect.sw.lat);
        bounds_union_[i].sw.lon = std::min(bounds_union_[i].sw.lon, rect.sw.lon);
        bounds_union_[i].ne.lat = std::max(bounds_union_[i].ne.lat, rect.ne.lat);
        bounds_union_[i].ne.lon = std::max(bounds_union_[i].ne.lon, rect.ne.lon);
        check_invariants();
        return best;
    }

    Region r;
    r.id = static_cast<RegionId>(regions_.size());
    r.name = "region-" + std::to_string(r.id);
    r.center = c;
    r.member_count = 1;
    regions_.push_back(r);
    bounds_union_.push_back(rect);
    check_invariants();
    return r.id;
}

void RegionRegistry::check_invariants() const {
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        if (!bounds_union_[i].contains(regions_[i].center)) {
            throw RuntimeError("region registry: center of region " + std::to_string(regions_[i].id) +
                               " fell outside its members' bounds union");
        }
    }
}

double avg_overlap(const Dataset& dataset) {
    std::vector<BoundingRect> rects;
    rects.reserve(dataset.samples.size());
    for (const auto& s : dataset.samples) {
        if (!s.coords) {
            throw DataError("avg_overlap: sample '" + s.source_id + "' carries no coordinates");
        }
        rects.push_back(tight_rect(s));
    }

    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        for (std::size_t j = i + 1; j < dataset.samples.size(); ++j) {
            if (dataset.samples[i].label != dataset.samples[j].label) continue;
            total += rect_iou(rects[i], rects[j]);
            ++pairs;
        }
    }
    return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

}  // namespace elev
