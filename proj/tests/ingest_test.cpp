#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "elevinfer/error.hpp"
#include "elevinfer/geometry.hpp"
#include "elevinfer/gpx.hpp"
#include "elevinfer/grid.hpp"
#include "elevinfer/provider.hpp"
#include "elevinfer/rng.hpp"
#include "elevinfer/terrain.hpp"

using namespace elev;

namespace {

// test-only GPX writer for the parse round-trip
std::string write_gpx(const ElevationProfile& profile) {
    std::ostringstream out;
    out.precision(17);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<gpx version=\"1.1\" creator=\"test\">\n<trk><trkseg>\n";
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        const auto& c = (*profile.coords)[i];
        out << "<trkpt lat=\"" << c.lat << "\" lon=\"" << c.lon << "\"><ele>"
            << profile.values[i] / kMetersToFeet << "</ele></trkpt>\n";
    }
    out << "</trkseg></trk>\n</gpx>\n";
    return out.str();
}

}  // namespace

TEST_CASE("parse_gpx: track points, unit conversion, errors") {
    const std::string doc =
        "<?xml version=\"1.0\"?><gpx><trk><trkseg>"
        "<trkpt lat=\"40.1\" lon=\"-74.2\"><ele>10</ele></trkpt>"
        "<trkpt lat=\"40.2\" lon=\"-74.3\"><ele>10</ele></trkpt>"
        "<trkpt lat=\"40.3\" lon=\"-74.4\"><ele>10</ele></trkpt>"
        "</trkseg></trk></gpx>";
    const auto p = parse_gpx(doc, "three");
    REQUIRE(p.values.size() == 3);
    for (double v : p.values) CHECK(v == doctest::Approx(32.8084).epsilon(1e-12));
    REQUIRE(p.coords.has_value());
    CHECK((*p.coords)[2].lat == doctest::Approx(40.3));
    CHECK((*p.coords)[2].lon == doctest::Approx(-74.4));

    CHECK_THROWS_AS(parse_gpx("<gpx><trk><trkseg></trkseg></trk></gpx>", "empty"), DataError);

    const std::string missing_ele =
        "<gpx><trk><trkseg>"
        "<trkpt lat=\"1\" lon=\"2\"><ele>5</ele></trkpt>"
        "<trkpt lat=\"1.1\" lon=\"2.1\"></trkpt>"
        "</trkseg></trk></gpx>";
    try {
        parse_gpx(missing_ele, "bad");
        FAIL("expected missing-elevation error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);  // names the point index
        CHECK(std::string(e.what()).find("ele") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_gpx("<gpx><trk>", "truncated"), DataError);
    CHECK_THROWS_AS(parse_gpx("not xml at all", "garbage"), DataError);
}

TEST_CASE("parse_gpx: serialize/parse round-trip within 1e-6 ft") {
    Rng rng(5);
    ElevationProfile p;
    std::vector<LatLon> coords;
    for (int i = 0; i < 40; ++i) {
        p.values.push_back(rng.uniform(-100.0, 4000.0));
        coords.push_back({rng.uniform(-89.0, 89.0), rng.uniform(-179.0, 179.0)});
    }
    p.coords = coords;
    const auto back = parse_gpx(write_gpx(p), "roundtrip");
    REQUIRE(back.values.size() == p.values.size());
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        CHECK(std::abs(back.values[i] - p.values[i]) < 1e-6);
    }
}

TEST_CASE("segment_grid: partitions row-major") {
    const auto tiles = segment_grid({{{0, 0}, {2, 2}}, 2, 2});
    REQUIRE(tiles.size() == 4);
    CHECK(tiles[0] == BoundingRect{{0, 0}, {1, 1}});
    CHECK(tiles[1] == BoundingRect{{0, 1}, {1, 2}});
    CHECK(tiles[2] == BoundingRect{{1, 0}, {2, 1}});
    CHECK(tiles[3] == BoundingRect{{1, 1}, {2, 2}});

    const auto identity = segment_grid({{{-1, -1}, {3, 5}}, 1, 1});
    REQUIRE(identity.size() == 1);
    CHECK(identity[0] == BoundingRect{{-1, -1}, {3, 5}});

    CHECK_THROWS_AS(segment_grid({{{1, 1}, {1, 5}}, 2, 2}), DataError);
}

TEST_CASE("segment_grid: tiles disjoint, union covers the boundary") {
    Rng rng(23);
    for (int it = 0; it < 30; ++it) {
        GridSpec spec;
        spec.boundary = {{rng.uniform(-50, 0), rng.uniform(-50, 0)},
                         {rng.uniform(1, 50), rng.uniform(1, 50)}};
        spec.rows = 1 + static_cast<int>(rng.next_below(6));
        spec.cols = 1 + static_cast<int>(rng.next_below(6));
        const auto tiles = segment_grid(spec);
        REQUIRE(tiles.size() == static_cast<std::size_t>(spec.rows * spec.cols));

        double area = 0.0;
        for (const auto& t : tiles) area += t.area();
        CHECK(area == doctest::Approx(spec.boundary.area()).epsilon(1e-9));

        for (std::size_t i = 0; i < tiles.size(); ++i) {
            for (std::size_t j = i + 1; j < tiles.size(); ++j) {
                CHECK(rect_iou(tiles[i], tiles[j]) == 0.0);  // interiors disjoint
            }
        }
    }
}

TEST_CASE("synth_terrain: bounds, determinism, zero relief") {
    TerrainSpec spec;
    spec.seed = 99;
    spec.base_elevation = 500.0;
    spec.relief = 80.0;
    spec.roughness = 0.6;
    spec.grid_size = 65;

    const auto a = synth_terrain(spec);
    const auto b = synth_terrain(spec);
    CHECK(a.values == b.values);  // bit-identical

    for (double v : a.values) {
        CHECK(v >= 420.0);
        CHECK(v <= 580.0);
    }

    TerrainSpec other = spec;
    other.seed = 100;
    const auto c = synth_terrain(other);
    CHECK(c.values != a.values);
    for (double v : c.values) {
        CHECK(v >= 420.0);
        CHECK(v <= 580.0);
    }

    TerrainSpec flat = spec;
    flat.relief = 0.0;
    const auto f = synth_terrain(flat);
    for (double v : f.values) CHECK(v == 500.0);

    TerrainSpec bad = spec;
    bad.grid_size = 64;
    CHECK_THROWS_AS(synth_terrain(bad), UsageError);
}

TEST_CASE("synth_routes: lengths, determinism, flat terrain") {
    TerrainSpec spec;
    spec.seed = 7;
    spec.relief = 50.0;
    spec.roughness = 0.5;
    const auto map = synth_terrain(spec);

    const auto one = synth_routes(map, 1, 2, 3);
    REQUIRE(one.size() == 1);
    CHECK(one[0].values.size() == 2);
    REQUIRE(one[0].coords.has_value());
    CHECK(one[0].coords->size() == 2);
    for (const auto& c : *one[0].coords) CHECK(map.bounds.contains(c));

    const auto again = synth_routes(map, 5, 30, 11);
    const auto again2 = synth_routes(map, 5, 30, 11);
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].values == again2[i].values);
    }

    TerrainSpec flat = spec;
    flat.relief = 0.0;
    const auto routes = synth_routes(synth_terrain(flat), 3, 20, 1);
    for (const auto& r : routes) {
        for (double v : r.values) CHECK(v == flat.base_elevation);
    }
}

TEST_CASE("synthetic segment source: at most ten routes inside the tile") {
    TerrainSpec spec;
    spec.seed = 13;
    const auto map = synth_terrain(spec);
    SyntheticSegmentSource source(map, 200, 12, 77);

    const auto inside = source.explore(map.bounds);
    CHECK(inside.size() <= 10);
    CHECK(!inside.empty());
    for (const auto& r : inside) {
        const auto rect = tight_rect(r);
        CHECK(map.bounds.contains(rect.sw));
        CHECK(map.bounds.contains(rect.ne));
    }

    const auto corner = source.explore({{0.0, 0.0}, {0.25, 0.25}});
    CHECK(corner.size() <= 10);
    for (const auto& r : corner) {
        const auto rect = tight_rect(r);
        CHECK(rect.sw.lat >= 0.0);
        CHECK(rect.ne.lat <= 0.25);
    }
}

TEST_CASE("tile store provider: feet tiles keyed by integer-degree cell") {
    const auto dir = std::filesystem::temp_directory_path() / "elevinfer_tiles_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream tile(dir / TileStoreProvider::tile_name({40.5, -74.5}));
        tile << R"({"elevation_ft": 100.0})";
    }
    TileStoreProvider provider(dir);

    const std::vector<LatLon> path{{40.1, -74.2}, {40.5, -74.9}, {40.9, -74.0001}};
    const auto elevations = fetch_elevations(path, provider);
    CHECK(elevations == std::vector<double>{100.0, 100.0, 100.0});

    CHECK_THROWS_AS(fetch_elevations({}, provider), UsageError);

    try {
        fetch_elevations({{40.5, -74.5}, {10.0, 10.0}}, provider);
        FAIL("expected out-of-coverage");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("http elevation provider: wire format and failure modes") {
    httplib::Server server;
    server.Get("/elevation", [](const httplib::Request& req, httplib::Response& res) {
        const auto locations = req.get_param_value("locations");
        std::string results;
        std::size_t count = 1;
        for (char c : locations) {
            if (c == '|') ++count;
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (i) results += ",";
            results += R"({"elevation": 10.0, "location": {"lat": 0.0, "lng": 0.0}})";
        }
        res.set_content(R"({"results":[)" + results + R"(],"status":"OK"})", "application/json");
    });
    server.Get("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"results":[],"status":"OVER_QUERY_LIMIT"})", "application/json");
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpElevationProvider provider("127.0.0.1", port);
    const auto elevations = fetch_elevations({{1.0, 2.0}, {3.0, 4.0}}, provider);
    REQUIRE(elevations.size() == 2);
    CHECK(elevations[0] == doctest::Approx(32.8084));  // meters on the wire, feet out

    HttpElevationProvider broken("127.0.0.1", port, "/broken");
    CHECK_THROWS_AS(broken.elevations({{1.0, 2.0}}), RuntimeError);

    HttpElevationProvider unreachable("127.0.0.1", 1, "/elevation");
    CHECK_THROWS_AS(unreachable.elevations({{1.0, 2.0}}), RuntimeError);

    server.stop();
    worker.join();
}

TEST_CASE("synthetic city/borough datasets are reproducible and labeled") {
    SynthSpec spec;
    spec.cities = 3;
    spec.routes_per_city = 6;
    spec.route_len = 30;
    spec.seed = 21;

    const auto a = synth_city_dataset(spec);
    const auto b = synth_city_dataset(spec);
    REQUIRE(a.samples.size() == 18);
    CHECK(a.labels() == std::vector<std::string>{"city-0", "city-1", "city-2"});
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].values == b.samples[i].values);
    }

    const auto boroughs = synth_borough_datasets(spec, 2, 2);
    REQUIRE(boroughs.size() == 3);
    for (const auto& [city, ds] : boroughs) {
        CHECK(ds.samples.size() == 6);
        for (const auto& s : ds.samples) {
            REQUIRE(s.label.has_value());
            CHECK(s.label->starts_with("borough-"));
        }
    }
}
