#include "elevinfer/grid.hpp"

#include "elevinfer/error.hpp"

namespace elev {

namespace {

// Edge i of m parts over [lo, hi]; lerp form so edge m lands on hi exactly.
double edge(double lo, double hi, int i, int m) {
    const double t = static_cast<double>(i) / static_cast<double>(m);
    return lo * (1.0 - t) + hi * t;
}

}  // namespace

std::vector<BoundingRect> segment_grid(const GridSpec& spec) {
    validate(spec.boundary);
    if (spec.rows < 1 || spec.cols < 1) throw UsageError("segment_grid: rows and cols must be >= 1");
    if (spec.boundary.area() <= 0.0) throw DataError("segment_grid: degenerate boundary");

    std::vector<BoundingRect> tiles;
    tiles.reserve(static_cast<std::size_t>(spec.rows) * static_cast<std::size_t>(spec.cols));
    for (int r = 0; r < spec.rows; ++r) {
        const double lat0 = edge(spec.boundary.sw.lat, spec.boundary.ne.lat, r, spec.rows);
        const double lat1 = edge(spec.boundary.sw.lat, spec.boundary.ne.lat, r + 1, spec.rows);
        for (int c = 0; c < spec.cols; ++c) {
            const double lon0 = edge(spec.boundary.sw.lon, spec.boundary.ne.lon, c, spec.cols);
            const double lon1 = edge(spec.boundary.sw.lon, spec.boundary.ne.lon, c + 1, spec.cols);
            tiles.push_back({{lat0, lon0}, {lat1, lon1}});
        }
    }
    return tiles;
}

}  // namespace elev
