#include "elevinfer/types.hpp"

#include <cmath>
#include <set>

#include "elevinfer/error.hpp"

namespace elev {

void validate(const ElevationProfile& profile) {
    if (profile.values.size() < 2) {
        throw DataError("profile '" + profile.source_id + "': needs at least 2 elevation values");
    }
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        if (!std::isfinite(profile.values[i])) {
            throw DataError("profile '" + profile.source_id + "': non-finite elevation at index " +
                            std::to_string(i));
        }
    }
    if (profile.coords) {
        if (profile.coords->size() != profile.values.size()) {
            throw DataError("profile '" + profile.source_id + "': coords length " +
                            std::to_string(profile.coords->size()) + " != values length " +
                            std::to_string(profile.values.size()));
        }
        for (std::size_t i = 0; i < profile.coords->size(); ++i) {
            const LatLon& p = (*profile.coords)[i];
            if (!(p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0)) {
                throw DataError("profile '" + profile.source_id + "': coordinate out of range at index " +
                                std::to_string(i));
            }
        }
    }
}

void validate(const BoundingRect& rect) {
    if (!(rect.sw.lat <= rect.ne.lat && rect.sw.lon <= rect.ne.lon)) {
        throw DataError("bounding rect: south-west corner must not exceed north-east corner");
    }
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::user_specific: return "user_specific";
        case Provenance::city_level: return "city_level";
        case Provenance::borough_level: return "borough_level";
        case Provenance::synthetic: return "synthetic";
    }
    return "synthetic";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "user_specific") return Provenance::user_specific;
    if (s == "city_level") return Provenance::city_level;
    if (s == "borough_level") return Provenance::borough_level;
    if (s == "synthetic") return Provenance::synthetic;
    throw DataError("unknown provenance '" + s + "'");
}

std::vector<std::string> Dataset::labels() const {
    std::set<std::string> out;
    for (const auto& s : samples) {
        if (s.label) out.insert(*s.label);
    }
    return {out.begin(), out.end()};
}

std::map<std::string, std::size_t> Dataset::label_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& s : samples) {
        if (s.label) ++counts[*s.label];
    }
    return counts;
}

void validate(const Dataset& dataset) {
    if (dataset.samples.empty()) throw DataError("dataset: no samples");
    for (const auto& s : dataset.samples) {
        if (!s.label) throw DataError("dataset: sample '" + s.source_id + "' has no label");
        validate(s);
    }
}

}  // namespace elev
