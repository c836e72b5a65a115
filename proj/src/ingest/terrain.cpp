#include "elevinfer/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elevinfer/error.hpp"
#include "elevinfer/geometry.hpp"
#include "elevinfer/grid.hpp"
#include "elevinfer/rng.hpp"

namespace elev {

namespace {

bool is_power_of_two_plus_one(int n) {
    const int m = n - 1;
    return m >= 2 && (m & (m - 1)) == 0;
}

void validate(const TerrainSpec& spec) {
    if (!is_power_of_two_plus_one(spec.grid_size) || spec.grid_size < 65) {
        throw UsageError("synth_terrain: grid_size must be a power of two + 1, at least 65 (got " +
                         std::to_string(spec.grid_size) + ")");
    }
    if (spec.relief < 0.0) throw UsageError("synth_terrain: relief must be >= 0");
    if (!(spec.roughness > 0.0 && spec.roughness < 1.0)) {
        throw UsageError("synth_terrain: roughness must lie in (0,1)");
    }
}

}  // namespace

Heightmap synth_terrain(const TerrainSpec& spec) {
    validate(spec);
    const int n = spec.grid_size;
    const double lo = spec.base_elevation - spec.relief;
    const double hi = spec.base_elevation + spec.relief;
    auto clamp = [&](double v) { return std::clamp(v, lo, hi); };

    Heightmap map;
    map.size = n;
    map.values.assign(static_cast<std::size_t>(n) * n, spec.base_elevation);
    map.bounds = {{0.0, 0.0}, {1.0, 1.0}};

    Rng rng(spec.seed);
    double amp = spec.relief;
    map.at(0, 0) = clamp(spec.base_elevation + rng.uniform(-amp, amp));
    map.at(0, n - 1) = clamp(spec.base_elevation + rng.uniform(-amp, amp));
    map.at(n - 1, 0) = clamp(spec.base_elevation + rng.uniform(-amp, amp));
    map.at(n - 1, n - 1) = clamp(spec.base_elevation + rng.uniform(-amp, amp));

    for (int step = n - 1; step > 1; step /= 2) {
        const int half = step / 2;
        amp *= spec.roughness;

        // diamond: centers from the four surrounding corners
        for (int r = half; r < n; r += step) {
            for (int c = half; c < n; c += step) {
                const double avg = (map.at(r - half, c - half) + map.at(r - half, c + half) +
                                    map.at(r + half, c - half) + map.at(r + half, c + half)) /
                                   4.0;
                map.at(r, c) = clamp(avg + rng.uniform(-amp, amp));
            }
        }

        // square: edge midpoints from their in-bounds neighbours
        for (int r = 0; r < n; r += half) {
            for (int c = (r / half) % 2 == 0 ? half : 0; c < n; c += step) {
                double sum = 0.0;
                int cnt = 0;
                if (r - half >= 0) { sum += map.at(r - half, c); ++cnt; }
                if (r + half < n) { sum += map.at(r + half, c); ++cnt; }
                if (c - half >= 0) { sum += map.at(r, c - half); ++cnt; }
                if (c + half < n) { sum += map.at(r, c + half); ++cnt; }
                map.at(r, c) = clamp(sum / cnt + rng.uniform(-amp, amp));
            }
        }
    }
    return map;
}

std::vector<ElevationProfile> synth_routes(const Heightmap& map, int n_routes, int route_len,
                                           std::uint64_t seed) {
    if (n_routes < 1) throw UsageError("synth_routes: n_routes must be >= 1");
    if (route_len < 2) throw UsageError("synth_routes: route_len must be >= 2");
    const int n = map.size;

    std::vector<ElevationProfile> routes;
    routes.reserve(static_cast<std::size_t>(n_routes));
    for (int i = 0; i < n_routes; ++i) {
        Rng rng(derive_seed(seed, "route", static_cast<std::uint64_t>(i)));
        std::vector<char> visited(static_cast<std::size_t>(n) * n, 0);

        int r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        int c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));

        ElevationProfile p;
        p.source_id = "route-" + std::to_string(i);
        std::vector<LatLon> coords;
        for (int step = 0; step < route_len; ++step) {
            visited[static_cast<std::size_t>(r) * n + c] = 1;
            p.values.push_back(map.at(r, c));
            coords.push_back({map.bounds.sw.lat + (r + 0.5) / n * map.bounds.height(),
                              map.bounds.sw.lon + (c + 0.5) / n * map.bounds.width()});
            if (step + 1 == route_len) break;

            const int dr[4] = {-1, 1, 0, 0};
            const int dc[4] = {0, 0, -1, 1};
            int fresh[4], any[4];
            int n_fresh = 0, n_any = 0;
            for (int d = 0; d < 4; ++d) {
                const int rr = r + dr[d], cc = c + dc[d];
                if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
                any[n_any++] = d;
                if (!visited[static_cast<std::size_t>(rr) * n + cc]) fresh[n_fresh++] = d;
            }
            // bias toward unvisited cells; fall back to a revisit at dead ends
            const int d = n_fresh > 0 ? fresh[rng.next_below(static_cast<std::uint64_t>(n_fresh))]
                                      : any[rng.next_below(static_cast<std::uint64_t>(n_any))];
            r += dr[d];
            c += dc[d];
        }
        p.coords = std::move(coords);
        routes.push_back(std::move(p));
    }
    return routes;
}

SyntheticSegmentSource::SyntheticSegmentSource(Heightmap map, int pool_size, int route_len,
                                               std::uint64_t seed)
    : map_(std::move(map)), pool_(synth_routes(map_, pool_size, route_len, seed)) {}

std::vector<ElevationProfile> SyntheticSegmentSource::explore(const BoundingRect& tile) {
    std::vector<ElevationProfile> out;
    for (const auto& route : pool_) {
        if (out.size() == kMaxRoutesPerTile) break;
        const auto rect = tight_rect(route);
        if (tile.contains(rect.sw) && tile.contains(rect.ne)) out.push_back(route);
    }
    return out;
}

namespace {

TerrainSpec city_terrain_spec(const SynthSpec& spec, int city_index) {
    TerrainSpec t;
    t.seed = derive_seed(spec.seed, "terrain", static_cast<std::uint64_t>(city_index));
    t.base_elevation = spec.base_start + spec.base_step * city_index;
    t.relief = spec.relief;
    t.roughness = std::clamp(spec.roughness + spec.roughness_step * city_index, 0.05, 0.95);
    t.grid_size = spec.grid_size;
    return t;
}

BoundingRect city_bounds(int city_index) {
    // cities sit side by side along the longitude axis
    const double lon0 = 1.2 * city_index;
    return {{0.0, lon0}, {1.0, lon0 + 1.0}};
}

}  // namespace

Dataset synth_city_dataset(const SynthSpec& spec) {
    if (spec.cities < 1) throw UsageError("synth: need at least one city");
    Dataset out;
    out.provenance = Provenance::synthetic;
    for (int city = 0; city < spec.cities; ++city) {
        auto map = synth_terrain(city_terrain_spec(spec, city));
        map.bounds = city_bounds(city);
        const std::string label = "city-" + std::to_string(city);
        auto routes = synth_routes(map, spec.routes_per_city, spec.route_len,
                                   derive_seed(spec.seed, "routes", static_cast<std::uint64_t>(city)));
        for (auto& r : routes) {
            r.label = label;
            r.source_id = label + "/" + r.source_id;
            out.samples.push_back(std::move(r));
        }
    }
    return out;
}

std::map<std::string, Dataset> synth_borough_datasets(const SynthSpec& spec, int borough_rows,
                                                      int borough_cols) {
    std::map<std::string, Dataset> out;
    for (int city = 0; city < spec.cities; ++city) {
        auto map = synth_terrain(city_terrain_spec(spec, city));
        map.bounds = city_bounds(city);
        const std::string city_name = "city-" + std::to_string(city);

        const auto tiles = segment_grid({map.bounds, borough_rows, borough_cols});
        auto routes = synth_routes(map, spec.routes_per_city, spec.route_len,
                                   derive_seed(spec.seed, "routes", static_cast<std::uint64_t>(city)));

        Dataset d;
        d.provenance = Provenance::borough_level;
        for (auto& r : routes) {
            const auto center = tight_rect(r).center();
            for (std::size_t t = 0; t < tiles.size(); ++t) {
                if (tiles[t].contains(center)) {
                    r.label = "borough-" + std::to_string(t);
                    break;
                }
            }
            r.source_id = city_name + "/" + r.source_id;
            d.samples.push_back(std::move(r));
        }
        out[city_name] = std::move(d);
    }
    return out;
}

}  // namespace elev
