#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "elevinfer/dataset.hpp"
#include "elevinfer/harness.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(ELEVINFER_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const fs::path kWork = fs::temp_directory_path() / "elevinfer_cli_test";

std::string synth_args(const fs::path& out) {
    return "--seed 7 synth --out " + out.string() +
           " --cities 2 --routes 8 --route-len 40";
}

}  // namespace

TEST_CASE("cli: synth is byte-identical across reruns") {
    fs::remove_all(kWork);
    const auto a = kWork / "a";
    REQUIRE(run(synth_args(a)) == 0);
    const auto first_records = slurp(a / "dataset.jsonl");
    const auto first_manifest = slurp(a / "manifest.json");
    const auto first_run = slurp(a / "run_manifest.json");

    // identical flags, identical outputs
    REQUIRE(run(synth_args(a)) == 0);
    CHECK(slurp(a / "dataset.jsonl") == first_records);
    CHECK(slurp(a / "manifest.json") == first_manifest);

    // run manifests agree on everything except the wall clock
    auto strip_clock = [](std::string text) {
        const auto at = text.find("wall_clock_ms");
        REQUIRE(at != std::string::npos);
        const auto end = text.find('\n', at);
        return text.erase(at, end - at);
    };
    CHECK(strip_clock(slurp(a / "run_manifest.json")) == strip_clock(first_run));
}

TEST_CASE("cli: exit codes for usage and data errors") {
    CHECK(run("--definitely-not-a-flag") == 2);
    CHECK(run("synth") == 2);                        // missing required --out
    CHECK(run("eval --in /nonexistent --out /tmp/elevinfer_nowhere --folds 2") == 3);
}

TEST_CASE("cli: eval emits report rows; report renders them") {
    fs::remove_all(kWork);
    const auto data = kWork / "data";
    REQUIRE(run(synth_args(data)) == 0);

    const auto out = kWork / "eval";
    REQUIRE(run("--seed 7 eval --in " + data.string() + " --out " + out.string() +
                " --tm 3 --classes 2 --rep ngrams --model rf --folds 2 "
                "--n-max 2 --target-dim 100") == 0);

    const auto rows = elev::read_report_csv(out / "report.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].experiment == "tm3");
    CHECK(rows[0].classes == 2);
    CHECK(rows[0].folds == 2);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "run_manifest.json"));

    const auto chart = kWork / "chart.svg";
    REQUIRE(run("report --in " + (out / "report.csv").string() + " --out " + chart.string()) == 0);
    const auto svg = slurp(chart);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("ngrams+forest") != std::string::npos);
}

TEST_CASE("cli: config file defaults defer to flags") {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    const auto config = kWork / "config.json";
    {
        std::ofstream f(config);
        f << R"({"seed": 11, "synth": {"cities": 3, "routes": 6, "route-len": 40}})";
    }
    const auto from_config = kWork / "from_config";
    REQUIRE(run("--config " + config.string() + " synth --out " + from_config.string()) == 0);
    const auto ds = elev::load_dataset(from_config);
    CHECK(ds.labels().size() == 3);  // cities came from the config file

    // explicit flag wins over the config file
    const auto overridden = kWork / "overridden";
    REQUIRE(run("--config " + config.string() + " synth --cities 2 --out " +
                overridden.string()) == 0);
    CHECK(elev::load_dataset(overridden).labels().size() == 2);
}
