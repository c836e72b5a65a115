#include <doctest.h>

#include <cmath>
#include <set>

#include "elevinfer/error.hpp"
#include "elevinfer/harness.hpp"
#include "elevinfer/rng.hpp"
#include "elevinfer/terrain.hpp"
#include "oracles.hpp"

using namespace elev;

namespace {

ElevationProfile profile_of(std::vector<double> values, std::string label = "L",
                            std::string id = "p") {
    ElevationProfile p;
    p.values = std::move(values);
    p.label = std::move(label);
    p.source_id = std::move(id);
    return p;
}

SynthSpec tiny_cities(int cities, int routes, int len, std::uint64_t seed) {
    SynthSpec spec;
    spec.cities = cities;
    spec.routes_per_city = routes;
    spec.route_len = len;
    spec.seed = seed;
    spec.base_start = 200.0;
    spec.base_step = 200.0;
    spec.relief = 50.0;
    spec.roughness = 0.55;
    return spec;
}

ExperimentSpec fast_spec(Representation rep, TrainedModel::Kind kind, int folds,
                         std::uint64_t seed) {
    ExperimentSpec spec;
    spec.representation = rep;
    spec.model.kind = kind;
    spec.folds = folds;
    spec.seed = seed;
    spec.model.svm.max_epochs = 60;
    spec.model.forest.n_trees = 10;
    spec.model.mlp.hidden_layers = {16};
    spec.model.mlp.epochs = 12;
    spec.text.n_max = 3;
    spec.text.target_dim = 200;
    spec.chunks.chunk_len = 16;
    return spec;
}

}  // namespace

TEST_CASE("chunk: exact division, truncation, padding") {
    std::vector<double> v96(96), v100(100), v10(10);
    for (std::size_t i = 0; i < v96.size(); ++i) v96[i] = static_cast<double>(i);
    for (std::size_t i = 0; i < v100.size(); ++i) v100[i] = static_cast<double>(i);
    for (std::size_t i = 0; i < v10.size(); ++i) v10[i] = static_cast<double>(i);

    ChunkSpec drop;  // chunk_len 32, drop
    CHECK(chunk(profile_of(v96), drop).size() == 3);
    const auto truncated = chunk(profile_of(v100), drop);
    CHECK(truncated.size() == 3);
    CHECK(truncated[2].back() == 95.0);  // 4 trailing values dropped

    ChunkSpec pad;
    pad.remainder = ChunkSpec::Remainder::pad_edge;
    const auto padded = chunk(profile_of(v10), pad);
    REQUIRE(padded.size() == 1);
    REQUIRE(padded[0].size() == 32);
    for (std::size_t i = 10; i < 32; ++i) CHECK(padded[0][i] == 9.0);

    CHECK_THROWS_AS(chunk(profile_of(v10), drop), DataError);
}

TEST_CASE("soft_vote: sums, reduction, ties") {
    const auto r = soft_vote({{0.6, 0.4}, {0.3, 0.7}, {0.8, 0.2}});
    CHECK(r.label == 0);
    CHECK(r.distribution[0] == doctest::Approx(1.7 / 3.0));

    const auto single = soft_vote({{0.2, 0.8}});
    CHECK(single.label == 1);

    const auto tie = soft_vote({{0.5, 0.5}, {0.5, 0.5}});
    CHECK(tie.label == 0);

    CHECK_THROWS_AS(soft_vote({{0.5, 0.5}, {1.0}}), UsageError);
    CHECK_THROWS_AS(soft_vote({}), UsageError);
}

TEST_CASE("soft_vote equals the argmax-of-sums oracle") {
    Rng rng(313);
    for (int it = 0; it < 1000; ++it) {
        const auto k = 2 + rng.next_below(5);
        const auto n = 1 + rng.next_below(8);
        std::vector<std::vector<double>> dists(n, std::vector<double>(k));
        for (auto& d : dists) {
            double total = 0.0;
            for (auto& x : d) {
                x = rng.uniform(0.0, 1.0);
                total += x;
            }
            for (auto& x : d) x /= total;
        }
        CHECK(soft_vote(dists).label == oracle::naive_soft_vote(dists));
    }
}

TEST_CASE("compute_metrics: identity, uniform, flags") {
    const std::vector<std::vector<std::size_t>> identity{{10, 0}, {0, 10}};
    auto m = compute_metrics(identity, {"A", "B"});
    CHECK(m.accuracy == 1.0);
    CHECK(m.macro_recall == 1.0);
    CHECK(m.macro_specificity == 1.0);
    CHECK(m.macro_f1 == 1.0);
    CHECK(m.flags.empty());

    const std::vector<std::vector<std::size_t>> uniform{{25, 25}, {25, 25}};
    m = compute_metrics(uniform, {"A", "B"});
    CHECK(m.accuracy == 0.5);
    CHECK(m.macro_recall == 0.5);
    CHECK(m.macro_specificity == 0.5);
    CHECK(m.macro_f1 == 0.5);

    // class B never predicted
    const std::vector<std::vector<std::size_t>> starved{{10, 0}, {10, 0}};
    m = compute_metrics(starved, {"A", "B"});
    CHECK(m.macro_f1 == doctest::Approx(0.5 * (2.0 * 0.5 * 1.0 / 1.5)));
    REQUIRE(m.flags.size() == 1);
    CHECK(m.flags[0].find("B") != std::string::npos);
    CHECK(m.flags[0].find("never predicted") != std::string::npos);

    CHECK_THROWS_AS(compute_metrics({{1, 2}, {3}}, {}), UsageError);
}

TEST_CASE("run_cv: bookkeeping on a tiny separable task") {
    const auto dataset = synth_city_dataset(tiny_cities(3, 8, 48, 5));
    auto spec = fast_spec(Representation::raw, TrainedModel::Kind::forest, 2, 17);

    const auto report = run_cv(spec, dataset);
    REQUIRE(report.labels.size() == 3);
    REQUIRE(report.fold_accuracies.size() == 2);

    // confusion rows sum to the per-class test counts of the balanced set
    for (const auto& row : report.confusion) {
        std::size_t total = 0;
        for (auto v : row) total += v;
        CHECK(total == 8);
    }
    // distinct=classes stay separable with raw forests
    CHECK(report.accuracy >= 0.7);
}

TEST_CASE("run_cv: insufficient samples names the class") {
    Dataset tiny;
    for (int i = 0; i < 3; ++i) {
        tiny.samples.push_back(profile_of({1.0, 2.0, 3.0}, "small", "s" + std::to_string(i)));
    }
    for (int i = 0; i < 10; ++i) {
        tiny.samples.push_back(profile_of({5.0, 6.0, 7.0}, "big", "b" + std::to_string(i)));
    }
    auto spec = fast_spec(Representation::ngrams, TrainedModel::Kind::forest, 5, 1);
    try {
        run_cv(spec, tiny);
        FAIL("expected insufficient-samples");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("small") != std::string::npos);
    }
}

TEST_CASE("run_cv: preprocessing fingerprints exclude the test fold") {
    const auto dataset = synth_city_dataset(tiny_cities(2, 10, 40, 9));
    for (auto rep : {Representation::ngrams, Representation::tfidf, Representation::image}) {
        auto spec = fast_spec(rep, TrainedModel::Kind::forest, 2, 23);
        const auto report = run_cv(spec, dataset);
        REQUIRE(report.fold_fingerprints.size() == report.fold_fingerprints_with_test.size());
        for (std::size_t f = 0; f < report.fold_fingerprints.size(); ++f) {
            CHECK(report.fold_fingerprints[f] != report.fold_fingerprints_with_test[f]);
        }
    }
}

TEST_CASE("run_cv: label permutation lands at chance for every rep/model pair") {
    // large enough that per-route clusters cannot skew the binomial model
    auto dataset = synth_city_dataset(tiny_cities(3, 30, 64, 31));
    // destroy the label-signal coupling
    Rng rng(555);
    std::vector<std::string> labels;
    for (const auto& s : dataset.samples) labels.push_back(*s.label);
    rng.shuffle(labels);
    for (std::size_t i = 0; i < labels.size(); ++i) dataset.samples[i].label = labels[i];

    for (auto rep : {Representation::raw, Representation::ngrams, Representation::tfidf,
                     Representation::image}) {
        for (auto kind :
             {TrainedModel::Kind::svm, TrainedModel::Kind::forest, TrainedModel::Kind::mlp}) {
            auto spec = fast_spec(rep, kind, 3, 47);
            const auto report = run_cv(spec, dataset);

            // binomial 99% interval around chance 1/3 over n test decisions
            std::size_t n = 0;
            for (const auto& row : report.confusion) {
                for (auto v : row) n += v;
            }
            const double p = 1.0 / 3.0;
            const double half_width =
                2.576 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) + 0.5 / static_cast<double>(n);
            INFO("rep=", to_string(rep), " model=", to_string(kind), " acc=", report.accuracy);
            CHECK(report.accuracy >= p - half_width);
            CHECK(report.accuracy <= p + half_width);
        }
    }
}

TEST_CASE("run_tm1: fixed subsets when the paper labels exist") {
    Dataset d;
    Rng rng(71);
    const std::vector<std::pair<std::string, double>> regions{
        {"WDC", 100.0}, {"ORL", 300.0}, {"NYC", 500.0}, {"SD", 700.0}};
    for (const auto& [name, base] : regions) {
        for (int i = 0; i < 8; ++i) {
            std::vector<double> values;
            for (int j = 0; j < 40; ++j) values.push_back(base + rng.uniform(-10.0, 10.0));
            d.samples.push_back(profile_of(values, name, name + std::to_string(i)));
        }
    }
    auto spec = fast_spec(Representation::ngrams, TrainedModel::Kind::forest, 2, 3);
    const auto reports = run_tm1(d, spec);
    REQUIRE(reports.size() == 3);
    CHECK(reports.at(2).labels == std::vector<std::string>{"ORL", "WDC"});
    CHECK(reports.at(3).labels == std::vector<std::string>{"NYC", "ORL", "WDC"});
    CHECK(reports.at(4).labels == std::vector<std::string>{"NYC", "ORL", "SD", "WDC"});
}

TEST_CASE("run_tm2: one report per city; run_tm3 sweeps seeded subsets") {
    const auto boroughs = synth_borough_datasets(tiny_cities(2, 24, 40, 13), 1, 2);
    auto spec = fast_spec(Representation::raw, TrainedModel::Kind::forest, 2, 5);
    const auto tm2 = run_tm2(boroughs, spec);
    CHECK(tm2.size() == 2);
    for (const auto& [city, report] : tm2) CHECK(report.labels.size() >= 2);

    const auto cities = synth_city_dataset(tiny_cities(5, 6, 40, 29));
    const auto tm3 = run_tm3(cities, spec, {3, 5});
    REQUIRE(tm3.size() == 2);
    CHECK(tm3.at(3).labels.size() == 3);
    CHECK(tm3.at(5).labels.size() == 5);
}

TEST_CASE("simulate_overlap: measured sibling ratio hits the target") {
    const auto dataset = synth_city_dataset(tiny_cities(2, 10, 120, 37));
    const auto augmented = simulate_overlap(dataset, 0.35, 41);

    CHECK(augmented.samples.size() == dataset.samples.size() * 3);
    const double measured = measured_overlap_ratio(augmented);
    CHECK(measured >= 0.33);
    CHECK(measured <= 0.37);

    // derived samples carry the parent's label
    for (const auto& s : augmented.samples) {
        if (s.source_id.find("#crop") != std::string::npos) {
            const auto parent_id = s.source_id.substr(0, s.source_id.find("#crop"));
            bool found = false;
            for (const auto& p : dataset.samples) {
                if (p.source_id == parent_id) {
                    CHECK(p.label == s.label);
                    found = true;
                }
            }
            CHECK(found);
        }
    }

    CHECK_THROWS_AS(simulate_overlap(dataset, 0.0, 1), UsageError);
    CHECK_THROWS_AS(simulate_overlap(dataset, 1.0, 1), UsageError);

    Dataset short_routes;
    short_routes.samples = {profile_of(std::vector<double>(30, 1.0), "A", "s0"),
                            profile_of(std::vector<double>(30, 2.0), "A", "s1")};
    CHECK_THROWS_AS(simulate_overlap(short_routes, 0.35, 1), DataError);
}

TEST_CASE("simulate_overlap strictly increases same-class signal overlap") {
    const auto dataset = synth_city_dataset(tiny_cities(2, 8, 100, 43));
    const double before = mean_same_class_signal_overlap(dataset, 7);
    const auto augmented = simulate_overlap(dataset, 0.3, 47);
    const double after = mean_same_class_signal_overlap(augmented, 7);
    CHECK(after > before);
}

TEST_CASE("report rows: CSV round-trip") {
    auto spec = fast_spec(Representation::tfidf, TrainedModel::Kind::svm, 10, 99);
    MetricsReport metrics;
    metrics.accuracy = 0.875;
    metrics.macro_recall = 0.8;
    metrics.macro_specificity = 0.9;
    metrics.macro_f1 = 0.85;

    const auto row = make_report_row("tm3", "5", spec, metrics, 5);
    const auto path = std::filesystem::temp_directory_path() / "elevinfer_report_test.csv";
    write_report_csv({row}, path);
    const auto rows = read_report_csv(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].experiment == "tm3");
    CHECK(rows[0].representation == "tfidf");
    CHECK(rows[0].model == "svm");
    CHECK(rows[0].classes == 5);
    CHECK(rows[0].accuracy == doctest::Approx(0.875));
    std::filesystem::remove(path);
}
