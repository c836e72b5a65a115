#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "elevinfer/types.hpp"

namespace elev {

// Synthetic stand-in for mined city data: a midpoint-displacement heightmap
// plus biased self-avoiding walks over it.

struct TerrainSpec {
    std::uint64_t seed = 0;
    double base_elevation = 500.0;  // feet
    double relief = 100.0;          // feet, >= 0
    double roughness = 0.5;         // in (0,1)
    int grid_size = 65;             // power of two + 1
};

struct Heightmap {
    int size = 0;
    std::vector<double> values;  // row-major, feet
    BoundingRect bounds;         // nominal geolocation box the grid maps onto

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * size + col]; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * size + col]; }
};

// Deterministic midpoint displacement. Every cell stays within
// [base_elevation - relief, base_elevation + relief].
Heightmap synth_terrain(const TerrainSpec& spec);

// Seeded biased self-avoiding random walks; elevation values come from the
// traversed cells and coords from mapping cells into the heightmap bounds.
std::vector<ElevationProfile> synth_routes(const Heightmap& map, int n_routes, int route_len,
                                           std::uint64_t seed);

// Behavioral contract of the mined-segment stand-in: at most ten routes,
// each fully inside the queried tile.
class SegmentSource {
public:
    virtual ~SegmentSource() = default;
    virtual std::vector<ElevationProfile> explore(const BoundingRect& tile) = 0;
};

class SyntheticSegmentSource : public SegmentSource {
public:
    SyntheticSegmentSource(Heightmap map, int pool_size, int route_len, std::uint64_t seed);
    std::vector<ElevationProfile> explore(const BoundingRect& tile) override;

    static constexpr int kMaxRoutesPerTile = 10;

private:
    Heightmap map_;
    std::vector<ElevationProfile> pool_;
};

// Whole-dataset generators used by the CLI and the experiment harnesses.
struct SynthSpec {
    int cities = 5;
    int routes_per_city = 200;
    int route_len = 128;
    std::uint64_t seed = 1;
    double base_start = 200.0;     // first city's base elevation
    double base_step = 150.0;      // per-city increment; separability knob
    double relief = 60.0;
    double roughness = 0.50;
    double roughness_step = 0.05;  // per-city increment
    int grid_size = 65;
};

// One dataset labeled by city name ("city-0", ...).
Dataset synth_city_dataset(const SynthSpec& spec);

// Per-city datasets labeled by borough (grid tiles of the city boundary).
std::map<std::string, Dataset> synth_borough_datasets(const SynthSpec& spec, int borough_rows,
                                                      int borough_cols);

}  // namespace elev
