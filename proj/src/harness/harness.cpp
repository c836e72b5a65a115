#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "elevinfer/dataset.hpp"
#include "elevinfer/defense.hpp"
#include "elevinfer/error.hpp"
#include "elevinfer/harness.hpp"
#include "elevinfer/kernels.hpp"
#include "elevinfer/rng.hpp"

namespace elev {

using nlohmann::json;

std::vector<std::vector<double>> chunk(const ElevationProfile& profile, const ChunkSpec& spec) {
    if (spec.chunk_len < 2) throw UsageError("chunk: chunk_len must be >= 2");
    if (profile.values.size() < 2) {
        throw DataError("chunk: profile '" + profile.source_id + "' too short");
    }
    const auto len = static_cast<std::size_t>(spec.chunk_len);
    const auto& v = profile.values;

    std::vector<std::vector<double>> chunks;
    std::size_t start = 0;
    for (; start + len <= v.size(); start += len) {
        chunks.emplace_back(v.begin() + static_cast<long>(start),
                            v.begin() + static_cast<long>(start + len));
    }
    const std::size_t rest = v.size() - start;
    if (chunks.empty() && spec.remainder == ChunkSpec::Remainder::drop) {
        throw DataError("chunk: profile '" + profile.source_id + "' shorter than chunk_len under drop policy");
    }
    if (rest > 0 && spec.remainder == ChunkSpec::Remainder::pad_edge) {
        std::vector<double> tail(v.begin() + static_cast<long>(start), v.end());
        tail.resize(len, v.back());  // repeat the last value
        chunks.push_back(std::move(tail));
    }
    return chunks;
}

SoftVoteResult soft_vote(const std::vector<std::vector<double>>& chunk_distributions) {
    if (chunk_distributions.empty()) throw UsageError("soft_vote: no distributions");
    const std::size_t k = chunk_distributions[0].size();
    std::vector<double> sums(k, 0.0);
    for (const auto& dist : chunk_distributions) {
        if (dist.size() != k) throw UsageError("soft_vote: distribution width mismatch");
        kernels::axpy(1.0, dist.data(), sums.data(), k);
    }
    SoftVoteResult result;
    result.label = argmax_lowest(sums.data(), k);
    const double total = kernels::sum(sums.data(), k);
    result.distribution = std::move(sums);
    if (total > 0.0) kernels::scale(result.distribution.data(), 1.0 / total, k);
    return result;
}

std::string to_string(ThreatModel tm) {
    switch (tm) {
        case ThreatModel::tm1: return "tm1";
        case ThreatModel::tm2: return "tm2";
        case ThreatModel::tm3: return "tm3";
    }
    return "tm3";
}

std::string to_string(Representation rep) {
    switch (rep) {
        case Representation::raw: return "raw";
        case Representation::ngrams: return "ngrams";
        case Representation::tfidf: return "tfidf";
        case Representation::image: return "image";
        case Representation::aggregate: return "aggregate";
    }
    return "ngrams";
}

Representation representation_from_string(const std::string& s) {
    if (s == "raw") return Representation::raw;
    if (s == "ngrams") return Representation::ngrams;
    if (s == "tfidf") return Representation::tfidf;
    if (s == "image") return Representation::image;
    if (s == "aggregate") return Representation::aggregate;
    throw UsageError("unknown representation '" + s + "'");
}

std::unique_ptr<TrainedModel> train_model(const ModelConfig& config, const Matrix& X,
                                          const std::vector<std::size_t>& y,
                                          const std::vector<std::string>& label_order,
                                          std::uint64_t seed) {
    switch (config.kind) {
        case TrainedModel::Kind::svm: {
            SvmConfig c = config.svm;
            c.seed = seed;
            return train_svm(X, y, label_order, c);
        }
        case TrainedModel::Kind::forest: {
            ForestConfig c = config.forest;
            c.seed = seed;
            return train_forest(X, y, label_order, c);
        }
        case TrainedModel::Kind::mlp: {
            MlpConfig c = config.mlp;
            c.seed = seed;
            return train_mlp(X, y, label_order, c);
        }
    }
    throw UsageError("train_model: unknown kind");
}

namespace {

std::vector<double> aggregate_features(const ElevationProfile& profile, double quantum) {
    const AggregateStats stats = aggregate(profile, quantum);
    return {stats.total_ascent,  stats.total_descent, stats.mean_ascent, stats.mean_descent,
            stats.std_ascent,    stats.std_descent,   stats.min_elev,    stats.max_elev};
}

}  // namespace

std::string FittedRep::fingerprint() const {
    json doc;
    doc["kind"] = to_string(kind);
    switch (kind) {
        case Representation::ngrams:
            doc["mode"] = to_string(mode);
            doc["codebook"] = codebook.to_json();
            doc["vocabulary"] = vocabulary.to_json();
            break;
        case Representation::tfidf:
            doc["mode"] = to_string(mode);
            doc["codebook"] = codebook.to_json();
            doc["vocabulary"] = tfidf.vocabulary.to_json();
            doc["n_docs"] = tfidf.n_docs;
            break;
        case Representation::image:
            doc["global_min"] = raster.global_min;
            doc["global_max"] = raster.global_max;
            doc["width"] = raster.width;
            doc["height"] = raster.height;
            doc["points"] = raster.points;
            break;
        case Representation::raw:
            doc["chunk_len"] = chunks.chunk_len;
            doc["pad"] = chunks.remainder == ChunkSpec::Remainder::pad_edge;
            break;
        case Representation::aggregate:
            doc["quantum"] = aggregate_quantum;
            break;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(doc.dump())));
    return buf;
}

FittedRep fit_representation(const ExperimentSpec& spec,
                             const std::vector<const ElevationProfile*>& training) {
    if (training.empty()) throw DataError("fit_representation: no training profiles");
    FittedRep rep;
    rep.kind = spec.representation;
    rep.mode = spec.text.mode;
    rep.chunks = spec.chunks;
    rep.raster = spec.raster;
    rep.aggregate_quantum = spec.aggregate_quantum;

    switch (spec.representation) {
        case Representation::ngrams:
        case Representation::tfidf: {
            Dataset train_view;
            for (const auto* p : training) train_view.samples.push_back(*p);
            auto encoded = encode(train_view, spec.text.mode, spec.text.alphabet_len);
            rep.codebook = std::move(encoded.codebook);
            auto vocab = build_vocabulary(encoded.corpus, spec.text.n_max);
            vocab = select_features(vocab, spec.text.target_dim);
            if (spec.representation == Representation::tfidf) {
                rep.tfidf = fit_tfidf(encoded.corpus, vocab);
            } else {
                rep.vocabulary = std::move(vocab);
            }
            break;
        }
        case Representation::image: {
            double lo = training[0]->values[0];
            double hi = lo;
            for (const auto* p : training) {
                for (double v : p->values) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            rep.raster.global_min = lo;
            rep.raster.global_max = hi;
            break;
        }
        case Representation::raw:
        case Representation::aggregate:
            break;  // nothing fitted
    }
    return rep;
}

namespace {

std::vector<double> transform_one(const FittedRep& rep, const ElevationProfile& profile) {
    switch (rep.kind) {
        case Representation::ngrams:
            return vectorize_ngrams(encode_line(profile.values, rep.mode, rep.codebook),
                                    rep.vocabulary);
        case Representation::tfidf:
            return vectorize_tfidf(encode_line(profile.values, rep.mode, rep.codebook), rep.tfidf);
        case Representation::image:
            return to_unit_floats(rasterize(resample(profile.values, rep.raster.points), rep.raster));
        case Representation::aggregate:
            return aggregate_features(profile, rep.aggregate_quantum);
        case Representation::raw:
            throw UsageError("transform_one: raw profiles expand to chunks, not a single row");
    }
    throw UsageError("transform_one: unknown representation");
}

}  // namespace

void training_matrix(const FittedRep& rep, const std::vector<const ElevationProfile*>& profiles,
                     const std::vector<std::size_t>& label_ids, Matrix& X_out,
                     std::vector<std::size_t>& y_out) {
    if (profiles.size() != label_ids.size()) throw UsageError("training_matrix: size mismatch");
    std::vector<std::vector<double>> rows;
    y_out.clear();
    if (rep.kind == Representation::raw) {
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            for (auto& piece : chunk(*profiles[i], rep.chunks)) {
                rows.push_back(std::move(piece));
                y_out.push_back(label_ids[i]);
            }
        }
    } else {
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            rows.push_back(transform_one(rep, *profiles[i]));
            y_out.push_back(label_ids[i]);
        }
    }
    X_out = from_rows(rows);
}

std::size_t classify_profile(const FittedRep& rep, const TrainedModel& model,
                             const ElevationProfile& profile) {
    if (rep.kind == Representation::raw) {
        const auto pieces = chunk(profile, rep.chunks);
        const Matrix probs = model.predict_proba(from_rows(pieces));
        std::vector<std::vector<double>> dists;
        dists.reserve(probs.rows);
        for (std::size_t i = 0; i < probs.rows; ++i) {
            dists.emplace_back(probs.row(i), probs.row(i) + probs.cols);
        }
        return soft_vote(dists).label;
    }
    Matrix X = from_rows({transform_one(rep, profile)});
    return model.predict(X)[0];
}

namespace {

struct FoldOutcome {
    std::vector<std::vector<std::size_t>> confusion;
    double accuracy = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    std::string fingerprint;
    std::string fingerprint_with_test;
};

FoldOutcome run_fold(const ExperimentSpec& spec, const Dataset& balanced,
                     const std::vector<std::string>& labels,
                     const std::map<std::string, std::size_t>& label_id,
                     const std::vector<std::vector<std::size_t>>& folds, std::size_t fold) {
    // training indices from every other fold, re-balanced exactly
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f == fold) continue;
        for (auto idx : folds[f]) by_label[*balanced.samples[idx].label].push_back(idx);
    }
    std::size_t min_count = static_cast<std::size_t>(-1);
    for (const auto& [label, idxs] : by_label) min_count = std::min(min_count, idxs.size());

    std::vector<std::size_t> train_idx;
    std::uint64_t label_counter = 0;
    for (auto& [label, idxs] : by_label) {
        Rng rng(derive_seed(spec.seed, "fold-balance",
                            static_cast<std::uint64_t>(fold) * 1000 + label_counter++));
        rng.shuffle(idxs);
        idxs.resize(min_count);
        std::sort(idxs.begin(), idxs.end());
        train_idx.insert(train_idx.end(), idxs.begin(), idxs.end());
    }

    std::vector<const ElevationProfile*> train_profiles;
    std::vector<std::size_t> train_labels;
    for (auto idx : train_idx) {
        train_profiles.push_back(&balanced.samples[idx]);
        train_labels.push_back(label_id.at(*balanced.samples[idx].label));
    }

    const FittedRep rep = fit_representation(spec, train_profiles);

    // audit trail: the same fit including the held-out fold must differ
    auto with_test_profiles = train_profiles;
    for (auto idx : folds[fold]) with_test_profiles.push_back(&balanced.samples[idx]);
    const FittedRep rep_with_test = fit_representation(spec, with_test_profiles);

    Matrix X;
    std::vector<std::size_t> y;
    training_matrix(rep, train_profiles, train_labels, X, y);
    const auto model = train_model(spec.model, X, y, labels,
                                   derive_seed(spec.seed, "model", static_cast<std::uint64_t>(fold)));

    FoldOutcome outcome;
    outcome.confusion.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
    for (auto idx : folds[fold]) {
        const auto& sample = balanced.samples[idx];
        const auto truth = label_id.at(*sample.label);
        const auto predicted = classify_profile(rep, *model, sample);
        ++outcome.confusion[truth][predicted];
    }

    const MetricsReport fold_metrics = compute_metrics(outcome.confusion, labels);
    outcome.accuracy = fold_metrics.accuracy;
    outcome.recall = fold_metrics.macro_recall;
    outcome.specificity = fold_metrics.macro_specificity;
    outcome.f1 = fold_metrics.macro_f1;
    outcome.fingerprint = rep.fingerprint();
    outcome.fingerprint_with_test = rep_with_test.fingerprint();
    return outcome;
}

}  // namespace

MetricsReport run_cv(const ExperimentSpec& spec, const Dataset& dataset) {
    if (spec.folds < 2) throw UsageError("run_cv: folds must be >= 2");

    Dataset selected;
    selected.provenance = dataset.provenance;
    if (spec.class_subset) {
        const std::set<std::string> keep(spec.class_subset->begin(), spec.class_subset->end());
        for (const auto& s : dataset.samples) {
            if (s.label && keep.count(*s.label)) selected.samples.push_back(s);
        }
    } else {
        selected.samples = dataset.samples;
    }

    // the class that pins the balanced size is the one worth naming
    {
        std::string smallest;
        std::size_t smallest_count = static_cast<std::size_t>(-1);
        for (const auto& [label, count] : selected.label_counts()) {
            if (count < smallest_count) {
                smallest_count = count;
                smallest = label;
            }
        }
        if (smallest_count < static_cast<std::size_t>(spec.folds)) {
            throw DataError("run_cv: insufficient samples: class '" + smallest + "' has " +
                            std::to_string(smallest_count) + ", needs >= " +
                            std::to_string(spec.folds) + " after balancing");
        }
    }

    const Dataset balanced = balance(selected, derive_seed(spec.seed, "cv-balance"));
    const auto labels = balanced.labels();
    if (labels.size() < 2) throw DataError("run_cv: need at least 2 classes");
    std::map<std::string, std::size_t> label_id;
    for (std::size_t i = 0; i < labels.size(); ++i) label_id[labels[i]] = i;

    // stratified fold assignment: deal each label's shuffled indices round-robin
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(spec.folds));
    {
        std::map<std::string, std::vector<std::size_t>> by_label;
        for (std::size_t i = 0; i < balanced.samples.size(); ++i) {
            by_label[*balanced.samples[i].label].push_back(i);
        }
        std::uint64_t label_counter = 0;
        for (auto& [label, idxs] : by_label) {
            Rng rng(derive_seed(spec.seed, "folds", label_counter++));
            rng.shuffle(idxs);
            for (std::size_t i = 0; i < idxs.size(); ++i) {
                folds[i % folds.size()].push_back(idxs[i]);
            }
        }
    }

    std::vector<FoldOutcome> outcomes(folds.size());
    const int jobs = std::max(1, spec.jobs);
    for (std::size_t start = 0; start < folds.size(); start += static_cast<std::size_t>(jobs)) {
        const std::size_t stop = std::min(folds.size(), start + static_cast<std::size_t>(jobs));
        std::vector<std::future<FoldOutcome>> batch;
        for (std::size_t f = start; f < stop; ++f) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                       [&, f] { return run_fold(spec, balanced, labels, label_id, folds, f); }));
        }
        for (std::size_t f = start; f < stop; ++f) outcomes[f] = batch[f - start].get();
    }

    MetricsReport report;
    report.labels = labels;
    report.confusion.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
    double acc = 0.0, rec = 0.0, spec_sum = 0.0, f1 = 0.0;
    for (const auto& o : outcomes) {
        for (std::size_t r = 0; r < labels.size(); ++r) {
            for (std::size_t c = 0; c < labels.size(); ++c) report.confusion[r][c] += o.confusion[r][c];
        }
        acc += o.accuracy;
        rec += o.recall;
        spec_sum += o.specificity;
        f1 += o.f1;
        report.fold_accuracies.push_back(o.accuracy);
        report.fold_fingerprints.push_back(o.fingerprint);
        report.fold_fingerprints_with_test.push_back(o.fingerprint_with_test);
    }
    const auto n = static_cast<double>(outcomes.size());
    report.accuracy = acc / n;
    report.macro_recall = rec / n;
    report.macro_specificity = spec_sum / n;
    report.macro_f1 = f1 / n;

    // merge per-class flags from the aggregate confusion
    report.flags = compute_metrics(report.confusion, labels).flags;
    return report;
}

namespace {

std::optional<std::vector<std::string>> tm1_fixed_subset(const std::vector<std::string>& labels,
                                                         int k) {
    static const std::vector<std::string> order{"WDC", "ORL", "NYC", "SD"};
    if (k < 2 || k > static_cast<int>(order.size())) return std::nullopt;
    std::vector<std::string> subset(order.begin(), order.begin() + k);
    const std::set<std::string> have(labels.begin(), labels.end());
    for (const auto& s : subset) {
        if (!have.count(s)) return std::nullopt;
    }
    return subset;
}

std::vector<std::string> seeded_subset(const std::vector<std::string>& labels, int k,
                                       std::uint64_t seed) {
    std::vector<std::string> pool = labels;
    Rng rng(seed);
    rng.shuffle(pool);
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

std::map<int, MetricsReport> run_tm1(const Dataset& dataset, const ExperimentSpec& spec,
                                     const std::vector<int>& class_counts) {
    const auto labels = dataset.labels();
    std::map<int, MetricsReport> out;
    for (int k : class_counts) {
        if (k < 2 || k > static_cast<int>(labels.size())) continue;
        ExperimentSpec cell = spec;
        cell.threat_model = ThreatModel::tm1;
        if (auto fixed = tm1_fixed_subset(labels, k)) {
            cell.class_subset = *fixed;
        } else {
            cell.class_subset =
                seeded_subset(labels, k, derive_seed(spec.seed, "tm1-subset", static_cast<std::uint64_t>(k)));
        }
        out[k] = run_cv(cell, dataset);
    }
    return out;
}

std::map<std::string, MetricsReport> run_tm2(const std::map<std::string, Dataset>& city_datasets,
                                             const ExperimentSpec& spec) {
    std::map<std::string, MetricsReport> out;
    for (const auto& [city, ds] : city_datasets) {
        ExperimentSpec cell = spec;
        cell.threat_model = ThreatModel::tm2;
        if (ds.labels().size() < 2) {
            throw DataError("run_tm2: city '" + city + "' has fewer than 2 borough labels");
        }
        out[city] = run_cv(cell, ds);
    }
    return out;
}

std::map<int, MetricsReport> run_tm3(const Dataset& dataset, const ExperimentSpec& spec,
                                     const std::vector<int>& class_counts) {
    const auto labels = dataset.labels();
    std::map<int, MetricsReport> out;
    for (int k : class_counts) {
        if (k < 2 || k > static_cast<int>(labels.size())) continue;
        ExperimentSpec cell = spec;
        cell.threat_model = ThreatModel::tm3;
        cell.class_subset = k == static_cast<int>(labels.size())
                                ? labels
                                : seeded_subset(labels, k,
                                                derive_seed(spec.seed, "tm3-subset",
                                                            static_cast<std::uint64_t>(k)));
        out[k] = run_cv(cell, dataset);
    }
    return out;
}

}  // namespace elev
