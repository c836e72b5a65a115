#include <doctest.h>

#include <filesystem>
#include <set>

#include "elevinfer/dataset.hpp"
#include "elevinfer/error.hpp"
#include "elevinfer/geometry.hpp"
#include "elevinfer/rng.hpp"
#include "elevinfer/types.hpp"

using namespace elev;

namespace {

ElevationProfile profile_with_coords(std::vector<LatLon> coords, std::string label = "L") {
    ElevationProfile p;
    p.values.assign(coords.size(), 100.0);
    p.coords = std::move(coords);
    p.label = std::move(label);
    p.source_id = "test";
    return p;
}

BoundingRect random_rect(Rng& rng) {
    const double lat0 = rng.uniform(-80.0, 80.0);
    const double lon0 = rng.uniform(-170.0, 170.0);
    return {{lat0, lon0}, {lat0 + rng.uniform(0.01, 5.0), lon0 + rng.uniform(0.01, 5.0)}};
}

}  // namespace

TEST_CASE("tight_rect: componentwise min/max") {
    auto p = profile_with_coords({{0, 0}, {2, 1}, {1, 3}});
    auto r = tight_rect(p);
    CHECK(r.sw == LatLon{0, 0});
    CHECK(r.ne == LatLon{2, 3});

    auto deg = tight_rect(profile_with_coords({{5, 5}, {5, 5}, {5, 5}}));
    CHECK(deg.sw == LatLon{5, 5});
    CHECK(deg.ne == LatLon{5, 5});
    CHECK(deg.area() == 0.0);

    auto two = tight_rect(profile_with_coords({{-1, -2}, {1, 2}}));
    CHECK(two.sw == LatLon{-1, -2});
    CHECK(two.ne == LatLon{1, 2});

    ElevationProfile no_coords;
    no_coords.values = {1.0, 2.0};
    CHECK_THROWS_AS(tight_rect(no_coords), DataError);
}

TEST_CASE("tight_rect: contains every input coordinate") {
    Rng rng(7);
    for (int it = 0; it < 200; ++it) {
        std::vector<LatLon> coords;
        const auto n = 2 + rng.next_below(20);
        for (std::size_t i = 0; i < n; ++i) {
            coords.push_back({rng.uniform(-89, 89), rng.uniform(-179, 179)});
        }
        auto p = profile_with_coords(coords);
        auto r = tight_rect(p);
        for (const auto& c : coords) CHECK(r.contains(c));
    }
}

TEST_CASE("rect_iou: examples and edge rules") {
    BoundingRect a{{0, 0}, {2, 2}};
    CHECK(rect_iou(a, a) == doctest::Approx(1.0));

    BoundingRect far{{10, 10}, {11, 11}};
    CHECK(rect_iou(a, far) == 0.0);

    // overlap 1x1, union 4+4-1=7
    BoundingRect b{{1, 1}, {3, 3}};
    CHECK(rect_iou(a, b) == doctest::Approx(1.0 / 7.0));

    BoundingRect point{{5, 5}, {5, 5}};
    CHECK(rect_iou(point, point) == 1.0);
    BoundingRect other_point{{6, 6}, {6, 6}};
    CHECK(rect_iou(point, other_point) == 0.0);
    // identical degenerate lines are not points: zero-area union -> 0
    BoundingRect line{{0, 0}, {0, 1}};
    CHECK(rect_iou(line, line) == 0.0);
}

TEST_CASE("rect_iou: symmetry and identity over random rectangles") {
    Rng rng(99);
    for (int it = 0; it < 2000; ++it) {
        auto a = random_rect(rng);
        auto b = random_rect(rng);
        const double ab = rect_iou(a, b);
        CHECK(ab == rect_iou(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(rect_iou(a, a) == doctest::Approx(1.0));
    }
}

TEST_CASE("assign_region: creation, matching, ties, idempotence") {
    RegionRegistry reg;
    BoundingRect r0{{-1, -1}, {1, 1}};  // center (0,0)
    auto id0 = reg.assign(r0, 0.5);
    CHECK(id0 == 0);
    CHECK(reg.regions()[0].member_count == 1);

    // nearest region within threshold wins
    RegionRegistry reg2;
    reg2.assign(BoundingRect{{0.1, 0}, {0.1, 0}}, 0.5);  // R0 at (0.1, 0)
    reg2.assign(BoundingRect{{5, 5}, {5, 5}}, 0.5);      // R1 at (5, 5)
    auto got = reg2.assign(BoundingRect{{0, 0}, {0, 0}}, 0.5);
    CHECK(got == 0);
    CHECK(reg2.regions()[0].member_count == 2);

    // equidistant centers: lowest id wins
    RegionRegistry reg3;
    reg3.assign(BoundingRect{{0, -1}, {0, -1}}, 0.5);  // R0 at (0,-1)
    reg3.assign(BoundingRect{{0, 1}, {0, 1}}, 0.5);    // R1 at (0,1)... distance 2 apart
    auto tie = reg3.assign(BoundingRect{{0, 0}, {0, 0}}, 1.5);
    CHECK(tie == 0);

    // unchanged registry + same rect -> same id
    auto again = reg2.assign(BoundingRect{{0, 0}, {0, 0}}, 0.5);
    CHECK(again == got);
}

TEST_CASE("avg_overlap: same-label pair means") {
    auto p1 = profile_with_coords({{0, 0}, {2, 2}}, "A");
    auto p2 = profile_with_coords({{0, 0}, {2, 2}}, "A");
    Dataset d;
    d.samples = {p1, p2};
    CHECK(avg_overlap(d) == doctest::Approx(1.0));

    Dataset disjoint;
    disjoint.samples = {profile_with_coords({{0, 0}, {1, 1}}, "A"),
                        profile_with_coords({{5, 5}, {6, 6}}, "A")};
    CHECK(avg_overlap(disjoint) == 0.0);

    // pairwise IoUs {1/7, 0, 0} -> mean 1/21
    Dataset three;
    three.samples = {profile_with_coords({{0, 0}, {2, 2}}, "A"),
                     profile_with_coords({{1, 1}, {3, 3}}, "A"),
                     profile_with_coords({{50, 50}, {51, 51}}, "A")};
    CHECK(avg_overlap(three) == doctest::Approx(1.0 / 21.0));

    // a different label contributes no pair
    Dataset mixed;
    mixed.samples = {profile_with_coords({{0, 0}, {2, 2}}, "A"),
                     profile_with_coords({{0, 0}, {2, 2}}, "B")};
    CHECK(avg_overlap(mixed) == 0.0);
}

namespace {

Dataset dataset_with_counts(const std::map<std::string, int>& counts) {
    Dataset d;
    for (const auto& [label, n] : counts) {
        for (int i = 0; i < n; ++i) {
            ElevationProfile p;
            p.values = {1.0 * i, 2.0 * i + 1.0};
            p.label = label;
            p.source_id = label + "-" + std::to_string(i);
            d.samples.push_back(p);
        }
    }
    return d;
}

}  // namespace

TEST_CASE("balance: equalizes to the smallest class") {
    auto even = dataset_with_counts({{"A", 10}, {"B", 10}});
    auto balanced_even = balance(even, 1);
    CHECK(balanced_even.samples.size() == 20);

    auto skewed = dataset_with_counts({{"WDC", 366}, {"SD", 18}});
    auto b = balance(skewed, 42);
    auto counts = b.label_counts();
    CHECK(counts["WDC"] == 18);
    CHECK(counts["SD"] == 18);

    // determinism per seed; different seeds may pick different subsets
    auto tri = dataset_with_counts({{"A", 5}, {"B", 3}, {"C", 3}});
    auto b1 = balance(tri, 7);
    auto b2 = balance(tri, 7);
    auto b3 = balance(tri, 8);
    REQUIRE(b1.samples.size() == 9);
    CHECK(b3.samples.size() == 9);
    for (std::size_t i = 0; i < b1.samples.size(); ++i) {
        CHECK(b1.samples[i].source_id == b2.samples[i].source_id);
    }
    for (const auto& [label, n] : b3.label_counts()) CHECK(n == 3);
}

TEST_CASE("balance: output counts equal and bounded by inputs") {
    Rng rng(555);
    for (int it = 0; it < 20; ++it) {
        std::map<std::string, int> spec;
        const int n_labels = 2 + static_cast<int>(rng.next_below(4));
        for (int l = 0; l < n_labels; ++l) {
            spec["L" + std::to_string(l)] = 2 + static_cast<int>(rng.next_below(12));
        }
        auto d = dataset_with_counts(spec);
        auto b = balance(d, rng.next_u64());
        const auto counts = b.label_counts();
        std::size_t expect = counts.begin()->second;
        for (const auto& [label, n] : counts) {
            CHECK(n == expect);
            CHECK(n <= static_cast<std::size_t>(spec[label]));
        }
    }
}

TEST_CASE("dataset: jsonl round-trip with manifest") {
    auto d = dataset_with_counts({{"A", 3}, {"B", 2}});
    d.samples[0].coords = std::vector<LatLon>{{1.5, 2.5}, {3.5, 4.5}};
    d.provenance = Provenance::city_level;

    const auto dir = std::filesystem::temp_directory_path() / "elevinfer_core_io_test";
    std::filesystem::remove_all(dir);
    save_dataset(d, dir);
    auto loaded = load_dataset(dir);

    REQUIRE(loaded.samples.size() == d.samples.size());
    CHECK(loaded.provenance == Provenance::city_level);
    CHECK(loaded.samples[0].coords.has_value());
    CHECK((*loaded.samples[0].coords)[1].lon == 4.5);
    CHECK(loaded.samples[0].values == d.samples[0].values);
    CHECK(loaded.labels() == std::vector<std::string>{"A", "B"});
    std::filesystem::remove_all(dir);
}
