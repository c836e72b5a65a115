#include "elevinfer/provider.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "elevinfer/error.hpp"
#include "elevinfer/gpx.hpp"

#include <httplib.h>

namespace elev {

using nlohmann::json;

std::vector<double> fetch_elevations(const std::vector<LatLon>& path, ElevationProvider& provider) {
    if (path.empty()) throw UsageError("fetch_elevations: empty path");
    auto out = provider.elevations(path);
    if (out.size() != path.size()) {
        throw RuntimeError("fetch_elevations: provider returned " + std::to_string(out.size()) +
                           " elevations for " + std::to_string(path.size()) + " coordinates");
    }
    return out;
}

TileStoreProvider::TileStoreProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string TileStoreProvider::tile_name(const LatLon& p) {
    const auto cell_lat = static_cast<long long>(std::floor(p.lat));
    const auto cell_lon = static_cast<long long>(std::floor(p.lon));
    return "tile_" + std::to_string(cell_lat) + "_" + std::to_string(cell_lon) + ".json";
}

std::vector<double> TileStoreProvider::elevations(const std::vector<LatLon>& path) {
    std::vector<double> out;
    out.reserve(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto file = dir_ / tile_name(path[i]);
        std::ifstream in(file);
        if (!in) {
            throw DataError("tile store: coordinate " + std::to_string(i) +
                            " out of coverage (no " + file.filename().string() + ")");
        }
        json tile = json::parse(in, nullptr, true);
        out.push_back(tile.at("elevation_ft").get<double>());
    }
    return out;
}

HttpElevationProvider::HttpElevationProvider(std::string host, int port, std::string path_prefix)
    : host_(std::move(host)), port_(port), path_prefix_(std::move(path_prefix)) {}

std::vector<double> HttpElevationProvider::elevations(const std::vector<LatLon>& path) {
    std::ostringstream locations;
    locations.precision(10);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) locations << "|";
        locations << path[i].lat << "," << path[i].lon;
    }

    httplib::Client client(host_, port_);
    httplib::Params params{{"locations", locations.str()}};
    auto res = client.Get(path_prefix_, params, httplib::Headers{});
    if (!res || res->status != 200) {
        throw RuntimeError("elevation provider unavailable: " +
                           (res ? "HTTP " + std::to_string(res->status) : "no response"));
    }

    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw RuntimeError(std::string("elevation provider unavailable: bad JSON: ") + e.what());
    }
    if (body.value("status", "") != "OK") {
        throw RuntimeError("elevation provider unavailable: status '" +
                           body.value("status", "<missing>") + "'");
    }

    std::vector<double> out;
    for (const auto& r : body.at("results")) {
        out.push_back(r.at("elevation").get<double>() * kMetersToFeet);
    }
    return out;
}

}  // namespace elev
