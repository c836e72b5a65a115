#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "elevinfer/types.hpp"

namespace elev {

// Downsamples every class to the smallest per-label count by seeded uniform
// sampling without replacement. Deterministic for a fixed seed.
Dataset balance(const Dataset& dataset, std::uint64_t seed);

// On-disk layout: newline-delimited JSON records (one per sample) plus a
// manifest JSON carrying provenance, the label list and the record count.
struct DatasetPaths {
    std::filesystem::path records;   // dataset.jsonl
    std::filesystem::path manifest;  // manifest.json
};

DatasetPaths dataset_paths(const std::filesystem::path& dir);

// extra_manifest, when non-empty, is merged into the manifest document
// (used for the defense annotation block).
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                  const std::string& extra_manifest_json = "");

Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace elev
