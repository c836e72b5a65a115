#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elevinfer/forest.hpp"
#include "elevinfer/imagerep.hpp"
#include "elevinfer/mlp.hpp"
#include "elevinfer/model.hpp"
#include "elevinfer/svm.hpp"
#include "elevinfer/textrep.hpp"
#include "elevinfer/types.hpp"

namespace elev {

// ---- raw chunking + soft voting ----

struct ChunkSpec {
    enum class Remainder { drop, pad_edge };
    int chunk_len = 32;
    Remainder remainder = Remainder::drop;
};

// Consecutive non-overlapping fixed-length windows. Profiles shorter than
// chunk_len yield one edge-padded chunk under pad_edge and an error under
// drop.
std::vector<std::vector<double>> chunk(const ElevationProfile& profile, const ChunkSpec& spec);

struct SoftVoteResult {
    std::size_t label = 0;              // argmax of the summed distributions
    std::vector<double> distribution;   // renormalized sum, for reporting
};

SoftVoteResult soft_vote(const std::vector<std::vector<double>>& chunk_distributions);

// ---- metrics ----

struct MetricsReport {
    double accuracy = 0.0;
    double macro_recall = 0.0;
    double macro_specificity = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> confusion;  // rows = true, cols = predicted
    std::vector<std::string> flags;                   // zero-support / never-predicted classes

    // cross-validation bookkeeping (empty for single confusion evaluations)
    std::vector<double> fold_accuracies;
    std::vector<std::string> fold_fingerprints;            // preprocessing fit on train only
    std::vector<std::string> fold_fingerprints_with_test;  // same fit including test data

    std::string to_json() const;
};

MetricsReport compute_metrics(const std::vector<std::vector<std::size_t>>& confusion,
                              const std::vector<std::string>& labels);

// ---- experiment specification ----

enum class ThreatModel { tm1, tm2, tm3 };
enum class Representation { raw, ngrams, tfidf, image, aggregate };

std::string to_string(ThreatModel tm);
std::string to_string(Representation rep);
Representation representation_from_string(const std::string& s);

struct TextOptions {
    DiscretizationMode mode = DiscretizationMode::floor_whole;
    int alphabet_len = 26;
    int n_max = 5;
    std::size_t target_dim = 5000;
};

struct ModelConfig {
    TrainedModel::Kind kind = TrainedModel::Kind::forest;
    SvmConfig svm;
    ForestConfig forest;
    MlpConfig mlp;
};

std::unique_ptr<TrainedModel> train_model(const ModelConfig& config, const Matrix& X,
                                          const std::vector<std::size_t>& y,
                                          const std::vector<std::string>& label_order,
                                          std::uint64_t seed);

struct ExperimentSpec {
    ThreatModel threat_model = ThreatModel::tm3;
    Representation representation = Representation::ngrams;
    ModelConfig model;
    int folds = 10;
    std::uint64_t seed = 0;
    std::optional<std::vector<std::string>> class_subset;
    ChunkSpec chunks;
    TextOptions text;
    RasterConfig raster;         // global range is fitted per fold
    double aggregate_quantum = 10.0;
    int jobs = 1;
};

// ---- per-fold fitted preprocessing (training folds only) ----

struct FittedRep {
    Representation kind = Representation::ngrams;
    DiscretizationMode mode = DiscretizationMode::floor_whole;
    Codebook codebook;          // text reps
    Vocabulary vocabulary;      // ngrams
    TfidfStats tfidf;           // tfidf
    RasterConfig raster;        // image, with fitted global range
    ChunkSpec chunks;           // raw
    double aggregate_quantum = 10.0;

    // stable digest of everything fitted; the leakage audit trail
    std::string fingerprint() const;
};

FittedRep fit_representation(const ExperimentSpec& spec,
                             const std::vector<const ElevationProfile*>& training);

// Feature rows for training; raw expands each profile into its chunks.
void training_matrix(const FittedRep& rep, const std::vector<const ElevationProfile*>& profiles,
                     const std::vector<std::size_t>& label_ids, Matrix& X_out,
                     std::vector<std::size_t>& y_out);

// Predicted label index for one profile (soft vote over chunks when raw).
std::size_t classify_profile(const FittedRep& rep, const TrainedModel& model,
                             const ElevationProfile& profile);

// ---- cross-validation and threat-model sweeps ----

// Stratified seeded folds over the balanced dataset; per fold the training
// split is re-balanced, preprocessing is fitted on it alone, the model is
// trained and the held-out fold is evaluated. Metrics are averaged over
// folds; the confusion matrix is summed.
MetricsReport run_cv(const ExperimentSpec& spec, const Dataset& dataset);

// TM-1: sweep over class counts with the fixed subsets from the published
// tables when those labels exist, seeded subsets otherwise.
std::map<int, MetricsReport> run_tm1(const Dataset& dataset, const ExperimentSpec& spec,
                                     const std::vector<int>& class_counts = {2, 3, 4});

// TM-2: one independent model per city over borough labels.
std::map<std::string, MetricsReport> run_tm2(const std::map<std::string, Dataset>& city_datasets,
                                             const ExperimentSpec& spec);

// TM-3: sweep over city label counts (seeded subsets).
std::map<int, MetricsReport> run_tm3(const Dataset& dataset, const ExperimentSpec& spec,
                                     const std::vector<int>& class_counts = {3, 5, 7, 8, 10});

// ---- overlap simulation ----

// Augments every class with pairs of overlapping crops of parent routes so
// the sibling-pair signal overlap lands within target_ratio +/- 0.02.
// Originals are retained; derived samples inherit the parent label and get
// source ids "<parent>#crop<k>".
Dataset simulate_overlap(const Dataset& dataset, double target_ratio, std::uint64_t seed);

// Mean shared-contiguous-subsequence ratio over same-parent crop pairs
// (the post-construction measurement for the simulation target).
double measured_overlap_ratio(const Dataset& augmented);

// Mean signal overlap over seeded same-class sample pairs (capped per
// label); used to show the simulation strictly increases overlap.
double mean_same_class_signal_overlap(const Dataset& dataset, std::uint64_t seed,
                                      std::size_t max_pairs_per_label = 100);

// ---- report rows (CSV round-trip for the CLI) ----

struct ReportRow {
    std::string experiment;  // tm1 / tm2 / tm3 / cv / defense...
    std::string cell;        // class count, city name, or arm name
    std::string representation;
    std::string model;
    int classes = 0;
    int folds = 0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double macro_recall = 0.0;
    double macro_specificity = 0.0;
    double macro_f1 = 0.0;
};

ReportRow make_report_row(std::string experiment, std::string cell, const ExperimentSpec& spec,
                          const MetricsReport& metrics, int classes);
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);
void write_confusion_csv(const MetricsReport& metrics, const std::filesystem::path& path);

}  // namespace elev
