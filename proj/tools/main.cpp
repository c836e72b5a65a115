// elevinfer: synthesize or ingest elevation datasets, build text/image/raw
// representations, train and evaluate the attack models, simulate route
// overlap, and evaluate the perturbation/aggregation defenses.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "elevinfer/dataset.hpp"
#include "elevinfer/defense.hpp"
#include "elevinfer/error.hpp"
#include "elevinfer/geometry.hpp"
#include "elevinfer/gpx.hpp"
#include "elevinfer/harness.hpp"
#include "elevinfer/kernels.hpp"
#include "elevinfer/rng.hpp"
#include "elevinfer/terrain.hpp"
#include "elevinfer/textrep.hpp"
#include "manifest.hpp"
#include "svg_report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace elev;

namespace {

// JSON config file support for CLI11 (flags > config file > defaults).
// Top-level keys address global options, nested objects address
// subcommands: {"seed": 7, "synth": {"cities": 5}}.
class ConfigJson : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json doc;
        for (const auto* opt : app->get_options({})) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                if (!opt->results().empty()) {
                    doc[opt->get_lnames()[0]] = opt->results().front();
                } else if (default_also) {
                    doc[opt->get_lnames()[0]] = opt->get_default_str();
                }
            }
        }
        return doc.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json doc;
        try {
            input >> doc;
        } catch (const json::parse_error& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        collect(doc, {}, items);
        return items;
    }

private:
    static void collect(const json& node, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : node.items()) {
            if (value.is_object()) {
                auto deeper = parents;
                deeper.push_back(key);
                collect(value, deeper, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& entry : value) item.inputs.push_back(scalar(entry));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }

    static std::string scalar(const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }
};

struct GlobalOpts {
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct SpecOpts {
    std::string representation = "ngrams";
    std::string model = "forest";
    int folds = 10;
    int chunk_len = 32;
    std::string mode = "floor_whole";
    int alphabet_len = 26;
    int n_max = 5;
    std::size_t target_dim = 5000;
    double quantum = 10.0;
    // model hyperparameters (CLI-level subset; JSON config reaches the rest)
    int svm_epochs = 300;
    double svm_lr = 0.05;
    double svm_penalty = 1e-3;
    int trees = 20;
    std::vector<std::size_t> hidden = {64, 64};
    int mlp_epochs = 60;
    double mlp_lr = 0.001;
};

void add_spec_options(CLI::App* cmd, SpecOpts& opts) {
    cmd->add_option("--rep", opts.representation,
                    "representation: raw|ngrams|tfidf|image|aggregate")
        ->capture_default_str();
    cmd->add_option("--model", opts.model, "model: svm|rf|mlp")->capture_default_str();
    cmd->add_option("--folds", opts.folds, "cross-validation folds")->capture_default_str();
    cmd->add_option("--chunk-len", opts.chunk_len, "raw chunk length")->capture_default_str();
    cmd->add_option("--mode", opts.mode, "discretization: floor_whole|floor_milli")
        ->capture_default_str();
    cmd->add_option("--alphabet-len", opts.alphabet_len, "codebook alphabet length (<= 26)")
        ->capture_default_str();
    cmd->add_option("--n-max", opts.n_max, "largest n-gram length")->capture_default_str();
    cmd->add_option("--target-dim", opts.target_dim, "feature-selection width")
        ->capture_default_str();
    cmd->add_option("--quantum", opts.quantum, "aggregation rounding quantum, feet")
        ->capture_default_str();
    cmd->add_option("--svm-epochs", opts.svm_epochs)->capture_default_str();
    cmd->add_option("--svm-lr", opts.svm_lr)->capture_default_str();
    cmd->add_option("--svm-penalty", opts.svm_penalty)->capture_default_str();
    cmd->add_option("--trees", opts.trees, "forest size")->capture_default_str();
    cmd->add_option("--hidden", opts.hidden, "MLP hidden layer widths")->capture_default_str();
    cmd->add_option("--mlp-epochs", opts.mlp_epochs)->capture_default_str();
    cmd->add_option("--mlp-lr", opts.mlp_lr)->capture_default_str();
}

ExperimentSpec build_spec(const GlobalOpts& global, const SpecOpts& opts) {
    ExperimentSpec spec;
    spec.representation = representation_from_string(opts.representation);
    spec.model.kind = model_kind_from_string(opts.model);
    spec.folds = opts.folds;
    spec.seed = derive_seed(global.seed, "experiment");
    spec.jobs = global.jobs;
    spec.chunks.chunk_len = opts.chunk_len;
    spec.text.mode = discretization_mode_from_string(opts.mode);
    spec.text.alphabet_len = opts.alphabet_len;
    spec.text.n_max = opts.n_max;
    spec.text.target_dim = opts.target_dim;
    spec.aggregate_quantum = opts.quantum;
    spec.model.svm.max_epochs = opts.svm_epochs;
    spec.model.svm.learning_rate = opts.svm_lr;
    spec.model.svm.penalty = opts.svm_penalty;
    spec.model.forest.n_trees = opts.trees;
    spec.model.mlp.hidden_layers = opts.hidden;
    spec.model.mlp.epochs = opts.mlp_epochs;
    spec.model.mlp.learning_rate = opts.mlp_lr;
    return spec;
}

std::map<std::string, std::string> echo_config(const CLI::App* cmd) {
    std::map<std::string, std::string> echo;
    for (const auto* opt : cmd->get_options({})) {
        if (opt->get_lnames().empty()) continue;
        std::string value;
        if (!opt->results().empty()) {
            for (const auto& r : opt->results()) {
                if (!value.empty()) value += ",";
                value += r;
            }
        } else {
            value = opt->get_default_str();
        }
        echo[opt->get_lnames()[0]] = value;
    }
    return echo;
}

class Stopwatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

// ---- synth ----

struct SynthOpts {
    std::string out;
    std::string level = "city";
    int cities = 5;
    int routes = 200;
    int route_len = 128;
    int borough_rows = 2;
    int borough_cols = 2;
    double base_start = 200.0;
    double base_step = 150.0;
    double relief = 60.0;
    double roughness = 0.50;
    double roughness_step = 0.05;
    int grid_size = 65;
};

int cmd_synth(const GlobalOpts& global, const SynthOpts& opts, const CLI::App* cmd) {
    Stopwatch watch;
    SynthSpec spec;
    spec.cities = opts.cities;
    spec.routes_per_city = opts.routes;
    spec.route_len = opts.route_len;
    spec.seed = derive_seed(global.seed, "synth");
    spec.base_start = opts.base_start;
    spec.base_step = opts.base_step;
    spec.relief = opts.relief;
    spec.roughness = opts.roughness;
    spec.roughness_step = opts.roughness_step;
    spec.grid_size = opts.grid_size;

    cli::RunManifest manifest;
    manifest.command = "synth";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;

    const fs::path out(opts.out);
    if (opts.level == "city") {
        const auto dataset = synth_city_dataset(spec);
        save_dataset(dataset, out);
        manifest.add_output(dataset_paths(out).records);
        manifest.add_output(dataset_paths(out).manifest);
        std::cout << "synth: " << dataset.samples.size() << " samples, "
                  << dataset.labels().size() << " cities -> " << out << "\n";
    } else if (opts.level == "borough") {
        const auto by_city = synth_borough_datasets(spec, opts.borough_rows, opts.borough_cols);
        std::size_t total = 0;
        for (const auto& [city, dataset] : by_city) {
            save_dataset(dataset, out / city);
            manifest.add_output(dataset_paths(out / city).records);
            manifest.add_output(dataset_paths(out / city).manifest);
            total += dataset.samples.size();
        }
        std::cout << "synth: " << total << " samples across " << by_city.size()
                  << " borough-labeled city datasets -> " << out << "\n";
    } else {
        throw UsageError("synth: --level must be city or borough");
    }

    manifest.wall_clock_ms = watch.ms();
    manifest.write(out / "run_manifest.json");
    return 0;
}

// ---- ingest ----

struct IngestOpts {
    std::string gpx_dir;
    std::string out;
    double region_threshold = 0.5;
    std::string label_map;
};

int cmd_ingest(const GlobalOpts& global, const IngestOpts& opts, const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "ingest";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;

    std::map<std::string, std::string> label_map;
    if (!opts.label_map.empty()) {
        std::ifstream in(opts.label_map);
        if (!in) throw DataError("ingest: cannot read label map " + opts.label_map);
        for (const auto& [key, value] : json::parse(in).items()) {
            label_map[key] = value.get<std::string>();
        }
        manifest.add_input(opts.label_map);
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opts.gpx_dir)) {
        if (entry.path().extension() == ".gpx") files.push_back(entry.path());
    }
    if (files.empty()) throw DataError("ingest: no .gpx files in " + opts.gpx_dir);
    std::sort(files.begin(), files.end());

    Dataset dataset;
    dataset.provenance = Provenance::user_specific;
    RegionRegistry registry;
    for (const auto& file : files) {
        manifest.add_input(file);
        std::ifstream in(file, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto profile = parse_gpx(text, file.stem().string());
        const auto region = registry.assign(tight_rect(profile), opts.region_threshold);
        const auto mapped = label_map.find(profile.source_id);
        profile.label = mapped != label_map.end() ? mapped->second
                                                  : registry.regions()[region].name;
        dataset.samples.push_back(std::move(profile));
    }

    const fs::path out(opts.out);
    save_dataset(dataset, out);
    manifest.add_output(dataset_paths(out).records);
    manifest.add_output(dataset_paths(out).manifest);
    manifest.wall_clock_ms = watch.ms();
    manifest.write(out / "run_manifest.json");
    std::cout << "ingest: " << dataset.samples.size() << " profiles, "
              << registry.regions().size() << " regions, avg overlap "
              << avg_overlap(dataset) << " -> " << out << "\n";
    return 0;
}

// ---- encode ----

struct EncodeOpts {
    std::string in;
    std::string out;
    std::string mode = "floor_whole";
    int alphabet_len = 26;
    int n_max = 5;
};

int cmd_encode(const GlobalOpts& global, const EncodeOpts& opts, const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "encode";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;
    manifest.add_input(dataset_paths(opts.in).records);

    const auto dataset = load_dataset(opts.in);
    const auto encoded = encode(dataset, discretization_mode_from_string(opts.mode),
                                opts.alphabet_len);
    const auto vocabulary = build_vocabulary(encoded.corpus, opts.n_max);

    const fs::path out(opts.out);
    fs::create_directories(out);
    {
        std::ofstream f(out / "codebook.json");
        f << encoded.codebook.to_json() << "\n";
    }
    {
        std::ofstream f(out / "vocabulary.json");
        f << vocabulary.to_json() << "\n";
    }
    {
        std::ofstream f(out / "corpus.txt");
        for (std::size_t i = 0; i < encoded.corpus.lines.size(); ++i) {
            f << encoded.corpus.labels[i] << "\t";
            const auto& line = encoded.corpus.lines[i];
            for (std::size_t w = 0; w < line.size(); ++w) {
                if (w) f << ' ';
                f << line[w];
            }
            f << "\n";
        }
    }
    for (const auto& name : {"codebook.json", "vocabulary.json", "corpus.txt"}) {
        manifest.add_output(out / name);
    }
    manifest.wall_clock_ms = watch.ms();
    manifest.write(out / "run_manifest.json");
    std::cout << "encode: codebook " << encoded.codebook.size() << " values (w="
              << encoded.codebook.word_width() << "), vocabulary " << vocabulary.size()
              << " -> " << out << "\n";
    return 0;
}

// ---- featurize ----

struct FeaturizeOpts {
    std::string in;
    std::string out;
};

int cmd_featurize(const GlobalOpts& global, const FeaturizeOpts& opts, const SpecOpts& spec_opts,
                  const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "featurize";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;
    manifest.add_input(dataset_paths(opts.in).records);

    const auto dataset = load_dataset(opts.in);
    auto spec = build_spec(global, spec_opts);

    std::vector<const ElevationProfile*> profiles;
    std::vector<std::size_t> label_ids;
    const auto labels = dataset.labels();
    std::map<std::string, std::size_t> label_id;
    for (std::size_t i = 0; i < labels.size(); ++i) label_id[labels[i]] = i;
    for (const auto& s : dataset.samples) {
        profiles.push_back(&s);
        label_ids.push_back(label_id.at(*s.label));
    }

    const auto rep = fit_representation(spec, profiles);
    Matrix X;
    std::vector<std::size_t> y;
    training_matrix(rep, profiles, label_ids, X, y);

    std::vector<std::string> header;
    if (spec.representation == Representation::ngrams) {
        for (const auto& e : rep.vocabulary.entries()) header.push_back(e.text);
    } else if (spec.representation == Representation::tfidf) {
        for (const auto& e : rep.tfidf.vocabulary.entries()) header.push_back(e.text);
    }
    write_csv(X, header, opts.out);

    manifest.add_output(opts.out);
    manifest.wall_clock_ms = watch.ms();
    manifest.write(fs::path(opts.out).parent_path() / "run_manifest.json");
    std::cout << "featurize: " << X.rows << " x " << X.cols << " (" << to_string(spec.representation)
              << ", fingerprint " << rep.fingerprint() << ") -> " << opts.out << "\n";
    return 0;
}

// ---- train ----

struct TrainOpts {
    std::string in;
    std::string out;
};

int cmd_train(const GlobalOpts& global, const TrainOpts& opts, const SpecOpts& spec_opts,
              const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "train";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;
    manifest.add_input(dataset_paths(opts.in).records);

    const auto dataset = load_dataset(opts.in);
    auto spec = build_spec(global, spec_opts);

    const auto labels = dataset.labels();
    std::map<std::string, std::size_t> label_id;
    for (std::size_t i = 0; i < labels.size(); ++i) label_id[labels[i]] = i;
    std::vector<const ElevationProfile*> profiles;
    std::vector<std::size_t> label_ids;
    for (const auto& s : dataset.samples) {
        profiles.push_back(&s);
        label_ids.push_back(label_id.at(*s.label));
    }

    const auto rep = fit_representation(spec, profiles);
    Matrix X;
    std::vector<std::size_t> y;
    training_matrix(rep, profiles, label_ids, X, y);
    auto model = train_model(spec.model, X, y, labels, derive_seed(spec.seed, "train"));
    model->set_preprocessing_fingerprint(rep.fingerprint());
    save_model(*model, opts.out);

    manifest.add_output(opts.out);
    manifest.wall_clock_ms = watch.ms();
    manifest.write(fs::path(opts.out).parent_path() / "run_manifest.json");
    std::cout << "train: " << to_string(spec.model.kind) << " on " << X.rows << " x " << X.cols
              << " -> " << opts.out << "\n";
    return 0;
}

// ---- eval ----

struct EvalOpts {
    std::string in;
    std::string out;
    int tm = 0;  // 0 = plain cross-validation
    std::vector<int> classes;
};

int cmd_eval(const GlobalOpts& global, const EvalOpts& opts, const SpecOpts& spec_opts,
             const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "eval";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;

    auto spec = build_spec(global, spec_opts);
    const fs::path out(opts.out);
    fs::create_directories(out);

    std::vector<ReportRow> rows;
    std::map<std::string, MetricsReport> confusions;

    if (opts.tm == 2) {
        std::map<std::string, Dataset> by_city;
        for (const auto& entry : fs::directory_iterator(opts.in)) {
            if (entry.is_directory() && fs::exists(dataset_paths(entry.path()).records)) {
                manifest.add_input(dataset_paths(entry.path()).records);
                by_city[entry.path().filename().string()] = load_dataset(entry.path());
            }
        }
        if (by_city.empty()) throw DataError("eval --tm 2: no per-city datasets under " + opts.in);
        for (const auto& [city, report] : run_tm2(by_city, spec)) {
            rows.push_back(make_report_row("tm2", city, spec, report,
                                           static_cast<int>(report.labels.size())));
            confusions["tm2_" + city] = report;
        }
    } else {
        manifest.add_input(dataset_paths(opts.in).records);
        const auto dataset = load_dataset(opts.in);
        if (opts.tm == 0) {
            const auto report = run_cv(spec, dataset);
            rows.push_back(make_report_row("cv", "all", spec, report,
                                           static_cast<int>(report.labels.size())));
            confusions["cv"] = report;
        } else if (opts.tm == 1) {
            const auto sweep = opts.classes.empty() ? std::vector<int>{2, 3, 4} : opts.classes;
            for (const auto& [k, report] : run_tm1(dataset, spec, sweep)) {
                rows.push_back(make_report_row("tm1", std::to_string(k), spec, report, k));
                confusions["tm1_" + std::to_string(k)] = report;
            }
        } else if (opts.tm == 3) {
            const auto sweep = opts.classes.empty() ? std::vector<int>{3, 5, 7, 8, 10} : opts.classes;
            for (const auto& [k, report] : run_tm3(dataset, spec, sweep)) {
                rows.push_back(make_report_row("tm3", std::to_string(k), spec, report, k));
                confusions["tm3_" + std::to_string(k)] = report;
            }
        } else {
            throw UsageError("eval: --tm must be 0, 1, 2 or 3");
        }
    }
    if (rows.empty()) throw DataError("eval: no feasible evaluation cells");

    write_report_csv(rows, out / "report.csv");
    manifest.add_output(out / "report.csv");
    json all;
    for (const auto& [name, report] : confusions) {
        write_confusion_csv(report, out / ("confusion_" + name + ".csv"));
        manifest.add_output(out / ("confusion_" + name + ".csv"));
        all[name] = json::parse(report.to_json());
    }
    {
        std::ofstream f(out / "report.json");
        f << all.dump(2) << "\n";
    }
    manifest.add_output(out / "report.json");
    manifest.wall_clock_ms = watch.ms();
    manifest.write(out / "run_manifest.json");

    for (const auto& row : rows) {
        std::cout << row.experiment << " " << row.cell << " " << row.representation << "+"
                  << row.model << ": accuracy " << row.accuracy << "\n";
    }
    return 0;
}

// ---- simulate ----

struct SimulateOpts {
    std::string in;
    std::string out;
    double ratio = 0.35;
};

int cmd_simulate(const GlobalOpts& global, const SimulateOpts& opts, const SpecOpts& spec_opts,
                 const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "simulate";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;
    manifest.add_input(dataset_paths(opts.in).records);

    const auto dataset = load_dataset(opts.in);
    auto spec = build_spec(global, spec_opts);

    const auto overlapped = simulate_overlap(dataset, opts.ratio, derive_seed(global.seed, "overlap"));
    const double measured = measured_overlap_ratio(overlapped);

    const fs::path out(opts.out);
    save_dataset(overlapped, out / "overlapped");
    manifest.add_output(dataset_paths(out / "overlapped").records);

    const auto baseline = run_cv(spec, dataset);
    const auto simulated = run_cv(spec, overlapped);
    std::vector<ReportRow> rows{
        make_report_row("simulate", "baseline", spec, baseline,
                        static_cast<int>(baseline.labels.size())),
        make_report_row("simulate", "overlapped", spec, simulated,
                        static_cast<int>(simulated.labels.size())),
    };
    write_report_csv(rows, out / "report.csv");
    manifest.add_output(out / "report.csv");

    json summary;
    summary["target_ratio"] = opts.ratio;
    summary["measured_ratio"] = measured;
    summary["baseline_accuracy"] = baseline.accuracy;
    summary["overlapped_accuracy"] = simulated.accuracy;
    {
        std::ofstream f(out / "summary.json");
        f << summary.dump(2) << "\n";
    }
    manifest.add_output(out / "summary.json");
    manifest.wall_clock_ms = watch.ms();
    manifest.write(out / "run_manifest.json");

    std::cout << "simulate: measured ratio " << measured << ", accuracy " << baseline.accuracy
              << " -> " << simulated.accuracy << "\n";
    return 0;
}

// ---- defend ----

struct DefendOpts {
    std::string in;
    std::string out;
    std::string defense = "perturb";
    double fraction = 0.10;
    int epoch_len = 10;
    int clip_window = 30;
};

int cmd_defend(const GlobalOpts& global, const DefendOpts& opts, const SpecOpts& spec_opts,
               const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "defend";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;
    manifest.add_input(dataset_paths(opts.in).records);

    const auto dataset = load_dataset(opts.in);
    auto spec = build_spec(global, spec_opts);

    DefenseConfig config;
    if (opts.defense == "perturb") {
        config.kind = DefenseKind::perturb;
        config.perturb.fraction = opts.fraction;
        config.perturb.epoch_len = opts.epoch_len;
        config.perturb.clip_window = opts.clip_window;
        config.perturb.seed = derive_seed(global.seed, "defense");
    } else if (opts.defense == "aggregate") {
        config.kind = DefenseKind::aggregate;
        config.quantum = spec_opts.quantum;  // shared --quantum flag
    } else {
        throw UsageError("defend: --defense must be perturb or aggregate");
    }

    MetricsReport clean, defended;
    const auto eval = evaluate_defense(dataset, config, spec, &clean, &defended);

    const fs::path out(opts.out);
    json annotation;
    annotation["defense"] = {{"kind", opts.defense},
                             {"fraction", opts.fraction},
                             {"epoch_len", opts.epoch_len},
                             {"clip_window", opts.clip_window},
                             {"quantum", spec_opts.quantum}};
    save_dataset(apply_defense(dataset, config), out / "defended", annotation.dump());
    manifest.add_output(dataset_paths(out / "defended").records);
    manifest.add_output(dataset_paths(out / "defended").manifest);

    std::vector<ReportRow> rows{
        make_report_row("defense", "clean", spec, clean, static_cast<int>(clean.labels.size())),
        make_report_row("defense", opts.defense, spec, defended,
                        static_cast<int>(defended.labels.size())),
    };
    write_report_csv(rows, out / "report.csv");
    manifest.add_output(out / "report.csv");

    json summary;
    summary["clean_accuracy"] = eval.clean_accuracy;
    summary["defended_accuracy"] = eval.defended_accuracy;
    summary["accuracy_delta"] = eval.accuracy_delta;
    {
        std::ofstream f(out / "summary.json");
        f << summary.dump(2) << "\n";
    }
    manifest.add_output(out / "summary.json");
    manifest.wall_clock_ms = watch.ms();
    manifest.write(out / "run_manifest.json");

    std::cout << "defend (" << opts.defense << "): accuracy " << eval.clean_accuracy << " -> "
              << eval.defended_accuracy << " (delta " << eval.accuracy_delta << ")\n";
    return 0;
}

// ---- report ----

struct ReportOpts {
    std::vector<std::string> in;
    std::string out;
};

int cmd_report(const GlobalOpts& global, const ReportOpts& opts, const CLI::App* cmd) {
    Stopwatch watch;
    cli::RunManifest manifest;
    manifest.command = "report";
    manifest.config = echo_config(cmd);
    manifest.seed = global.seed;

    std::vector<ReportRow> rows;
    for (const auto& file : opts.in) {
        manifest.add_input(file);
        const auto part = read_report_csv(file);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    cli::write_accuracy_chart(rows, opts.out);
    manifest.add_output(opts.out);
    manifest.wall_clock_ms = watch.ms();
    manifest.write(fs::path(opts.out).parent_path() / "run_manifest.json");
    std::cout << "report: " << rows.size() << " rows -> " << opts.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elevation-profile location inference pipeline"};
    app.config_formatter(std::make_shared<ConfigJson>());
    app.set_config("--config", "", "JSON config file (flags take precedence)");
    app.require_subcommand(1);

    GlobalOpts global;
    app.add_option("--seed", global.seed, "master seed; all randomness derives from it")
        ->envname("ELEVINFER_SEED")
        ->capture_default_str();
    app.add_option("--jobs", global.jobs, "parallel folds")
        ->envname("ELEVINFER_JOBS")
        ->capture_default_str();

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic city/borough datasets");
    synth_cmd->add_option("--out", synth.out)->required();
    synth_cmd->add_option("--level", synth.level, "city|borough")->capture_default_str();
    synth_cmd->add_option("--cities", synth.cities)->capture_default_str();
    synth_cmd->add_option("--routes", synth.routes, "routes per city")->capture_default_str();
    synth_cmd->add_option("--route-len", synth.route_len)->capture_default_str();
    synth_cmd->add_option("--borough-rows", synth.borough_rows)->capture_default_str();
    synth_cmd->add_option("--borough-cols", synth.borough_cols)->capture_default_str();
    synth_cmd->add_option("--base-start", synth.base_start)->capture_default_str();
    synth_cmd->add_option("--base-step", synth.base_step)->capture_default_str();
    synth_cmd->add_option("--relief", synth.relief)->capture_default_str();
    synth_cmd->add_option("--roughness", synth.roughness)->capture_default_str();
    synth_cmd->add_option("--roughness-step", synth.roughness_step)->capture_default_str();
    synth_cmd->add_option("--grid-size", synth.grid_size)->capture_default_str();

    IngestOpts ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "GPX directory -> labeled dataset");
    ingest_cmd->add_option("--gpx-dir", ingest.gpx_dir)->required();
    ingest_cmd->add_option("--out", ingest.out)->required();
    ingest_cmd->add_option("--region-threshold", ingest.region_threshold,
                           "region matching threshold, degrees")
        ->capture_default_str();
    ingest_cmd->add_option("--label-map", ingest.label_map,
                           "JSON {source_id: label} overriding region names");

    EncodeOpts encode_opts;
    auto* encode_cmd = app.add_subcommand("encode", "text-like encoding artifacts");
    encode_cmd->add_option("--in", encode_opts.in)->required();
    encode_cmd->add_option("--out", encode_opts.out)->required();
    encode_cmd->add_option("--mode", encode_opts.mode)->capture_default_str();
    encode_cmd->add_option("--alphabet-len", encode_opts.alphabet_len)->capture_default_str();
    encode_cmd->add_option("--n-max", encode_opts.n_max)->capture_default_str();

    FeaturizeOpts featurize;
    SpecOpts featurize_spec;
    auto* featurize_cmd = app.add_subcommand("featurize", "feature matrix export");
    featurize_cmd->add_option("--in", featurize.in)->required();
    featurize_cmd->add_option("--out", featurize.out)->required();
    add_spec_options(featurize_cmd, featurize_spec);

    TrainOpts train;
    SpecOpts train_spec;
    auto* train_cmd = app.add_subcommand("train", "train one model on a dataset");
    train_cmd->add_option("--in", train.in)->required();
    train_cmd->add_option("--out", train.out)->required();
    add_spec_options(train_cmd, train_spec);

    EvalOpts eval;
    SpecOpts eval_spec;
    auto* eval_cmd = app.add_subcommand("eval", "cross-validated evaluation / TM sweeps");
    eval_cmd->add_option("--in", eval.in)->required();
    eval_cmd->add_option("--out", eval.out)->required();
    eval_cmd->add_option("--tm", eval.tm, "0 plain CV, 1/2/3 threat models")->capture_default_str();
    eval_cmd->add_option("--classes", eval.classes, "class-count sweep, e.g. 3,5");
    add_spec_options(eval_cmd, eval_spec);

    SimulateOpts simulate;
    SpecOpts simulate_spec;
    auto* simulate_cmd = app.add_subcommand("simulate", "overlap simulation + comparison");
    simulate_cmd->add_option("--in", simulate.in)->required();
    simulate_cmd->add_option("--out", simulate.out)->required();
    simulate_cmd->add_option("--ratio", simulate.ratio)->capture_default_str();
    add_spec_options(simulate_cmd, simulate_spec);

    DefendOpts defend;
    SpecOpts defend_spec;
    auto* defend_cmd = app.add_subcommand("defend", "defense evaluation + defended dataset");
    defend_cmd->add_option("--in", defend.in)->required();
    defend_cmd->add_option("--out", defend.out)->required();
    defend_cmd->add_option("--defense", defend.defense, "perturb|aggregate")->capture_default_str();
    defend_cmd->add_option("--fraction", defend.fraction)->capture_default_str();
    defend_cmd->add_option("--epoch-len", defend.epoch_len)->capture_default_str();
    defend_cmd->add_option("--clip-window", defend.clip_window)->capture_default_str();
    add_spec_options(defend_cmd, defend_spec);

    ReportOpts report;
    auto* report_cmd = app.add_subcommand("report", "SVG bar charts from eval/defend CSVs");
    report_cmd->add_option("--in", report.in, "report.csv files")->required();
    report_cmd->add_option("--out", report.out)->required();

    try {
        app.parse(argc, argv);
        if (synth_cmd->parsed()) return cmd_synth(global, synth, synth_cmd);
        if (ingest_cmd->parsed()) return cmd_ingest(global, ingest, ingest_cmd);
        if (encode_cmd->parsed()) return cmd_encode(global, encode_opts, encode_cmd);
        if (featurize_cmd->parsed()) {
            return cmd_featurize(global, featurize, featurize_spec, featurize_cmd);
        }
        if (train_cmd->parsed()) return cmd_train(global, train, train_spec, train_cmd);
        if (eval_cmd->parsed()) return cmd_eval(global, eval, eval_spec, eval_cmd);
        if (simulate_cmd->parsed()) return cmd_simulate(global, simulate, simulate_spec, simulate_cmd);
        if (defend_cmd->parsed()) return cmd_defend(global, defend, defend_spec, defend_cmd);
        if (report_cmd->parsed()) return cmd_report(global, report, report_cmd);
        std::cerr << "error: usage: no subcommand given\n";
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n" << app.help() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: runtime: " << e.what() << "\n";
        return 4;
    }
}
