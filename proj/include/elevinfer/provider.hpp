#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "elevinfer/types.hpp"

namespace elev {

// Elevation lookup behind the ingest pipeline. Implementations return feet
// (the pipeline unit) and must either be safe for concurrent calls or say
// otherwise; both implementations here are safe for concurrent reads.
class ElevationProvider {
public:
    virtual ~ElevationProvider() = default;
    virtual std::vector<double> elevations(const std::vector<LatLon>& path) = 0;
};

// One elevation per coordinate. Throws UsageError on an empty path and
// propagates provider-unavailable / out-of-coverage errors.
std::vector<double> fetch_elevations(const std::vector<LatLon>& path, ElevationProvider& provider);

// File-backed stub: a directory of JSON tiles keyed by integer-degree cell,
// named tile_<lat>_<lon>.json with an "elevation_ft" field. A coordinate
// whose cell has no tile is out of coverage.
class TileStoreProvider : public ElevationProvider {
public:
    explicit TileStoreProvider(std::filesystem::path dir);
    std::vector<double> elevations(const std::vector<LatLon>& path) override;

    static std::string tile_name(const LatLon& p);

private:
    std::filesystem::path dir_;
};

// Speaks the elevation HTTP wire format:
//   GET <prefix>?locations=lat,lon|lat,lon...
//   {"results":[{"elevation":<meters>,"location":{"lat":..,"lng":..}}],"status":"OK"}
// Any non-"OK" status or transport failure is provider-unavailable.
class HttpElevationProvider : public ElevationProvider {
public:
    HttpElevationProvider(std::string host, int port, std::string path_prefix = "/elevation");
    std::vector<double> elevations(const std::vector<LatLon>& path) override;

private:
    std::string host_;
    int port_;
    std::string path_prefix_;
};

}  // namespace elev
