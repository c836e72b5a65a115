#include "elevinfer/defense.hpp"

#include <algorithm>
#include <cmath>

#include "elevinfer/error.hpp"
#include "elevinfer/harness.hpp"
#include "elevinfer/imagerep.hpp"
#include "elevinfer/kernels.hpp"
#include "elevinfer/rng.hpp"

namespace elev {

namespace {

double population_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = kernels::sum(v.data(), v.size()) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

// trailing window with edge truncation
void moving_stats(const std::vector<double>& v, int window, std::size_t i, double& ma, double& s) {
    const std::size_t lo = i + 1 >= static_cast<std::size_t>(window)
                               ? i + 1 - static_cast<std::size_t>(window)
                               : 0;
    const std::size_t len = i - lo + 1;
    ma = kernels::sum(v.data() + lo, len) / static_cast<double>(len);
    double acc = 0.0;
    for (std::size_t j = lo; j <= i; ++j) acc += (v[j] - ma) * (v[j] - ma);
    s = std::sqrt(acc / static_cast<double>(len));
}

}  // namespace

ElevationProfile perturb(const ElevationProfile& profile, const PerturbSpec& spec) {
    if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) {
        throw UsageError("perturb: fraction must lie in (0,1]");
    }
    if (spec.epoch_len < 1) throw UsageError("perturb: epoch_len must be >= 1");
    const std::size_t n = profile.values.size();
    if (n < static_cast<std::size_t>(spec.clip_window)) {
        throw DataError("perturb: profile '" + profile.source_id + "' shorter than the clip window");
    }

    const double sigma = population_std(profile.values);
    if (sigma == 0.0) return profile;  // constant signal: nothing plausible to add

    // ceil(fraction*n) positions in contiguous epochs; at least one epoch
    std::size_t budget = static_cast<std::size_t>(
        std::ceil(spec.fraction * static_cast<double>(n)));
    budget = std::max<std::size_t>(budget, 1);
    const auto epoch_len = static_cast<std::size_t>(spec.epoch_len);

    // seeded non-overlapping epoch starts
    Rng rng(spec.seed);
    std::vector<std::size_t> starts;
    {
        std::vector<std::size_t> candidates;
        for (std::size_t s = 0; s + 1 <= n; s += 1) candidates.push_back(s);
        rng.shuffle(candidates);
        std::vector<char> taken(n, 0);
        std::size_t remaining = budget;
        for (std::size_t s : candidates) {
            if (remaining == 0) break;
            const std::size_t len = std::min({epoch_len, remaining, n - s});
            bool free = true;
            for (std::size_t j = s; j < s + len; ++j) {
                if (taken[j]) {
                    free = false;
                    break;
                }
            }
            if (!free) continue;
            for (std::size_t j = s; j < s + len; ++j) taken[j] = 1;
            starts.push_back(s);
            remaining -= len;
        }
    }
    std::sort(starts.begin(), starts.end());

    ElevationProfile out = profile;
    std::size_t remaining = budget;
    for (std::size_t s : starts) {
        const std::size_t len = std::min({epoch_len, remaining, n - s});
        remaining -= len;
        const double epoch_noise = rng.gaussian(0.0, sigma);
        for (std::size_t j = s; j < s + len; ++j) {
            const double jitter = rng.gaussian(0.0, sigma / 10.0);
            double ma, sd;
            moving_stats(profile.values, spec.clip_window, j, ma, sd);
            out.values[j] = std::clamp(profile.values[j] + epoch_noise + jitter, ma - sd, ma + sd);
        }
    }
    return out;
}

namespace {

double quantize(double x, double quantum) {
    if (quantum <= 0.0) return x;
    return std::round(x / quantum) * quantum;
}

}  // namespace

AggregateStats aggregate(const ElevationProfile& profile, double quantum, int sampled_points) {
    if (profile.values.size() < 2) {
        throw DataError("aggregate: profile '" + profile.source_id + "' needs >= 2 values");
    }

    std::vector<double> rises, drops;
    double ascent = 0.0, descent = 0.0;
    for (std::size_t i = 1; i < profile.values.size(); ++i) {
        const double delta = profile.values[i] - profile.values[i - 1];
        if (delta > 0.0) {
            ascent += delta;
            rises.push_back(delta);
        } else if (delta < 0.0) {
            descent -= delta;
            drops.push_back(-delta);
        }
    }

    auto mean_of = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : kernels::sum(v.data(), v.size()) / static_cast<double>(v.size());
    };

    AggregateStats stats;
    stats.rounding_quantum = quantum;
    stats.total_ascent = quantize(ascent, quantum);
    stats.total_descent = quantize(descent, quantum);
    stats.mean_ascent = quantize(mean_of(rises), quantum);
    stats.mean_descent = quantize(mean_of(drops), quantum);
    stats.std_ascent = quantize(population_std(rises), quantum);
    stats.std_descent = quantize(population_std(drops), quantum);
    const auto [lo, hi] = std::minmax_element(profile.values.begin(), profile.values.end());
    stats.min_elev = quantize(*lo, quantum);
    stats.max_elev = quantize(*hi, quantum);

    if (sampled_points > 0) {
        auto sampled = resample(profile.values, sampled_points);
        for (auto& v : sampled) v = quantize(v, quantum);
        stats.sampled_signal = std::move(sampled);
    }
    return stats;
}

Dataset apply_defense(const Dataset& dataset, const DefenseConfig& config) {
    if (config.kind == DefenseKind::aggregate) return dataset;

    Dataset out;
    out.provenance = dataset.provenance;
    out.samples.reserve(dataset.samples.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        PerturbSpec per_sample = config.perturb;
        per_sample.seed = derive_seed(config.perturb.seed, "perturb", i);
        out.samples.push_back(perturb(dataset.samples[i], per_sample));
    }
    return out;
}

DefenseEvaluation evaluate_defense(const Dataset& dataset, const DefenseConfig& config,
                                   const ExperimentSpec& attack_spec, MetricsReport* clean_out,
                                   MetricsReport* defended_out) {
    const MetricsReport clean = run_cv(attack_spec, dataset);

    MetricsReport defended;
    if (config.kind == DefenseKind::perturb) {
        defended = run_cv(attack_spec, apply_defense(dataset, config));
    } else {
        ExperimentSpec agg_spec = attack_spec;  // same seeds and folds
        agg_spec.representation = Representation::aggregate;
        agg_spec.aggregate_quantum = config.quantum;
        defended = run_cv(agg_spec, dataset);
    }

    DefenseEvaluation eval;
    eval.clean_accuracy = clean.accuracy;
    eval.defended_accuracy = defended.accuracy;
    eval.accuracy_delta = clean.accuracy - defended.accuracy;
    if (clean_out) *clean_out = clean;
    if (defended_out) *defended_out = defended;
    return eval;
}

}  // namespace elev
