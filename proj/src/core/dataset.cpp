#include "elevinfer/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "elevinfer/error.hpp"
#include "elevinfer/rng.hpp"

namespace elev {

using nlohmann::json;

Dataset balance(const Dataset& dataset, std::uint64_t seed) {
    validate(dataset);
    const auto counts = dataset.label_counts();
    std::size_t min_count = std::numeric_limits<std::size_t>::max();
    for (const auto& [label, n] : counts) min_count = std::min(min_count, n);

    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        by_label[*dataset.samples[i].label].push_back(i);
    }

    Dataset out;
    out.provenance = dataset.provenance;
    std::uint64_t label_index = 0;
    for (auto& [label, indices] : by_label) {  // std::map iterates labels in sorted order
        Rng rng(derive_seed(seed, "balance", label_index++));
        rng.shuffle(indices);
        std::vector<std::size_t> chosen(indices.begin(), indices.begin() + static_cast<long>(min_count));
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i : chosen) out.samples.push_back(dataset.samples[i]);
    }
    return out;
}

DatasetPaths dataset_paths(const std::filesystem::path& dir) {
    return {dir / "dataset.jsonl", dir / "manifest.json"};
}

namespace {

json record_to_json(const ElevationProfile& p) {
    json rec;
    rec["source_id"] = p.source_id;
    rec["label"] = p.label.value_or("");
    rec["values"] = p.values;
    if (p.coords) {
        json coords = json::array();
        for (const LatLon& c : *p.coords) coords.push_back(json::array({c.lat, c.lon}));
        rec["coords"] = std::move(coords);
    }
    return rec;
}

ElevationProfile record_from_json(const json& rec) {
    ElevationProfile p;
    p.source_id = rec.at("source_id").get<std::string>();
    const auto label = rec.at("label").get<std::string>();
    if (!label.empty()) p.label = label;
    p.values = rec.at("values").get<std::vector<double>>();
    if (rec.contains("coords")) {
        std::vector<LatLon> coords;
        for (const auto& c : rec.at("coords")) {
            coords.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        }
        p.coords = std::move(coords);
    }
    return p;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                  const std::string& extra_manifest_json) {
    std::filesystem::create_directories(dir);
    const auto paths = dataset_paths(dir);

    std::ofstream records(paths.records);
    if (!records) throw DataError("cannot write " + paths.records.string());
    for (const auto& sample : dataset.samples) {
        records << record_to_json(sample).dump() << "\n";
    }
    records.close();

    json manifest;
    manifest["provenance"] = to_string(dataset.provenance);
    manifest["labels"] = dataset.labels();
    manifest["record_count"] = dataset.samples.size();
    if (!extra_manifest_json.empty()) {
        manifest.merge_patch(json::parse(extra_manifest_json));
    }
    std::ofstream mf(paths.manifest);
    if (!mf) throw DataError("cannot write " + paths.manifest.string());
    mf << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto paths = dataset_paths(dir);
    std::ifstream records(paths.records);
    if (!records) throw DataError("cannot read " + paths.records.string());

    Dataset out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(records, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(paths.records.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.samples.push_back(record_from_json(rec));
    }

    std::ifstream mf(paths.manifest);
    if (!mf) throw DataError("cannot read " + paths.manifest.string());
    json manifest = json::parse(mf, nullptr, true);
    out.provenance = provenance_from_string(manifest.at("provenance").get<std::string>());
    if (manifest.at("record_count").get<std::size_t>() != out.samples.size()) {
        throw DataError(paths.manifest.string() + ": record_count does not match " +
                        paths.records.string());
    }
    return out;
}

}  // namespace elev
