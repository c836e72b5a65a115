#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "elevinfer/types.hpp"

namespace elev {

struct ExperimentSpec;   // harness.hpp
struct MetricsReport;

// ---- perturbation defense ----

// Plausible Gaussian perturbation: ceil(fraction*n) positions grouped into
// contiguous epochs get dependently generated noise (one epoch-level draw
// plus sigma/10 jitter), clipped to one moving standard deviation around
// the moving average at each position.
struct PerturbSpec {
    double fraction = 0.10;   // share of samples perturbed, in (0,1]
    int epoch_len = 10;       // samples per epoch (10 s at 1 Hz)
    int clip_window = 30;     // trailing moving-average window
    std::uint64_t seed = 0;
};

ElevationProfile perturb(const ElevationProfile& profile, const PerturbSpec& spec);

// ---- aggregation defense ----

// Application-compliant statistics; everything quantized to the rounding
// quantum (0 disables rounding).
struct AggregateStats {
    double total_ascent = 0.0;
    double total_descent = 0.0;
    double mean_ascent = 0.0;
    double mean_descent = 0.0;
    double std_ascent = 0.0;
    double std_descent = 0.0;
    double min_elev = 0.0;
    double max_elev = 0.0;
    std::optional<std::vector<double>> sampled_signal;
    double rounding_quantum = 10.0;
};

AggregateStats aggregate(const ElevationProfile& profile, double quantum,
                         int sampled_points = 0);

// ---- defense evaluation ----

enum class DefenseKind { perturb, aggregate };

struct DefenseConfig {
    DefenseKind kind = DefenseKind::perturb;
    PerturbSpec perturb;
    double quantum = 10.0;  // aggregation defense rounding
};

// The defended dataset handed to the attacker: perturbed signals for the
// perturbation defense; unchanged signals for aggregation (the attack then
// sees only the AggregateStats feature vector).
Dataset apply_defense(const Dataset& dataset, const DefenseConfig& config);

// Paired evaluation with identical seeds/folds: the attack on clean data
// versus the attack on defended data.
struct DefenseEvaluation {
    double clean_accuracy = 0.0;
    double defended_accuracy = 0.0;
    double accuracy_delta = 0.0;  // clean - defended
};

DefenseEvaluation evaluate_defense(const Dataset& dataset, const DefenseConfig& config,
                                   const ExperimentSpec& attack_spec, MetricsReport* clean_out = nullptr,
                                   MetricsReport* defended_out = nullptr);

}  // namespace elev
