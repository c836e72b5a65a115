#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "elevinfer/error.hpp"
#include "elevinfer/rng.hpp"

namespace elev::cli {

using nlohmann::json;

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot hash missing file " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(bytes)));
    return buf;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    input_hashes[path.string()] = hash_file(path);
}

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs.push_back(path.string());
}

void RunManifest::write(const std::filesystem::path& path) const {
    json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["seed"] = seed;
    doc["inputs"] = input_hashes;
    json out_hashes;
    for (const auto& out : outputs) out_hashes[out] = hash_file(out);
    doc["outputs"] = out_hashes;
    doc["wall_clock_ms"] = wall_clock_ms;

    std::ofstream file(path);
    if (!file) throw DataError("cannot write manifest " + path.string());
    file << doc.dump(2) << "\n";
}

}  // namespace elev::cli
