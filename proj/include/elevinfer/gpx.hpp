#pragma once

#include <string_view>

#include "elevinfer/types.hpp"

namespace elev {

inline constexpr double kMetersToFeet = 3.28084;

// Parses the GPX 1.1 subset trk/trkseg/trkpt@lat,@lon with child <ele>
// (meters). Elevations are converted to feet at ingest; coords are kept.
// Throws DataError on malformed XML, on a trackpoint without <ele>
// (naming the point index) and on tracks without points.
ElevationProfile parse_gpx(std::string_view document, std::string source_id = "gpx");

}  // namespace elev
