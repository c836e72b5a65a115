#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace elev::cli {

// Every command writes exactly one run manifest next to its outputs:
// the command name, the full flag echo, the master seed, input file
// hashes, output paths and the wall clock. Reruns with identical inputs
// and flags must produce byte-identical outputs (the wall clock is the
// only field allowed to differ).
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_hashes;    // path -> fnv64 hex
    std::map<std::string, std::string> output_hashes;   // path -> fnv64 hex
    std::vector<std::string> outputs;
    double wall_clock_ms = 0.0;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);  // hashed lazily on write
    void write(const std::filesystem::path& path) const;
};

std::string hash_file(const std::filesystem::path& path);

}  // namespace elev::cli
