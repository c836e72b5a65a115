#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace elev {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const LatLon&) const = default;
};

// Axis-aligned box over raw lat/lon degrees; sw <= ne componentwise.
struct BoundingRect {
    LatLon sw;
    LatLon ne;

    bool operator==(const BoundingRect&) const = default;

    double width() const { return ne.lon - sw.lon; }
    double height() const { return ne.lat - sw.lat; }
    double area() const { return width() * height(); }
    LatLon center() const { return {(sw.lat + ne.lat) / 2.0, (sw.lon + ne.lon) / 2.0}; }
    bool contains(const LatLon& p) const {
        return p.lat >= sw.lat && p.lat <= ne.lat && p.lon >= sw.lon && p.lon <= ne.lon;
    }
};

// One route sample: elevation values in feet, optional geometry, optional
// label. The atom of the whole pipeline.
struct ElevationProfile {
    std::vector<double> values;                      // feet
    std::optional<std::vector<LatLon>> coords;       // same length as values when present
    std::optional<std::string> label;
    std::string source_id;
};

// Throws DataError when an invariant is violated (finite values, coord
// count, coordinate ranges).
void validate(const ElevationProfile& profile);
void validate(const BoundingRect& rect);

using RegionId = int;

struct Region {
    RegionId id = 0;
    std::string name;
    LatLon center;
    int member_count = 0;
};

enum class Provenance { user_specific, city_level, borough_level, synthetic };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct Dataset {
    std::vector<ElevationProfile> samples;
    Provenance provenance = Provenance::synthetic;

    // Distinct labels in sorted order.
    std::vector<std::string> labels() const;
    std::map<std::string, std::size_t> label_counts() const;
};

// Every sample labeled, per-label count >= 1, profiles valid.
void validate(const Dataset& dataset);

}  // namespace elev
