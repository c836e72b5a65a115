#include <algorithm>
#include <cmath>
#include <map>

#include "elevinfer/error.hpp"
#include "elevinfer/harness.hpp"
#include "elevinfer/rng.hpp"

namespace elev {

namespace {

// longest common contiguous run of exactly equal values
std::size_t longest_common_run(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

double overlap_ratio(const ElevationProfile& a, const ElevationProfile& b) {
    const auto shorter = std::min(a.values.size(), b.values.size());
    if (shorter == 0) return 0.0;
    return static_cast<double>(longest_common_run(a.values, b.values)) /
           static_cast<double>(shorter);
}

ElevationProfile crop(const ElevationProfile& parent, std::size_t start, std::size_t len,
                      int crop_index) {
    ElevationProfile out;
    out.values.assign(parent.values.begin() + static_cast<long>(start),
                      parent.values.begin() + static_cast<long>(start + len));
    if (parent.coords) {
        out.coords = std::vector<LatLon>(parent.coords->begin() + static_cast<long>(start),
                                         parent.coords->begin() + static_cast<long>(start + len));
    }
    out.label = parent.label;  // derived samples always carry the parent's label
    out.source_id = parent.source_id + "#crop" + std::to_string(crop_index);
    return out;
}

}  // namespace

Dataset simulate_overlap(const Dataset& dataset, double target_ratio, std::uint64_t seed) {
    if (!(target_ratio > 0.0 && target_ratio < 1.0)) {
        throw UsageError("simulate_overlap: target ratio must lie in (0,1)");
    }
    validate(dataset);

    Dataset out = dataset;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& parent = dataset.samples[i];
        const std::size_t n = parent.values.size();
        const std::size_t m = n / 2;  // crop window length
        // rounding the shared length to whole samples must stay within 0.02
        if (m < 25) {
            throw DataError("simulate_overlap: unattainable ratio: route '" + parent.source_id +
                            "' has " + std::to_string(n) + " samples, needs >= 50");
        }
        auto shared = static_cast<std::size_t>(
            std::lround(target_ratio * static_cast<double>(m)));
        shared = std::clamp<std::size_t>(shared, 1, m - 1);
        const std::size_t shift = m - shared;

        Rng rng(derive_seed(seed, "overlap", i));
        const std::size_t max_base = n - (m + shift);
        const std::size_t base = max_base > 0 ? rng.next_below(max_base + 1) : 0;

        out.samples.push_back(crop(parent, base, m, 0));
        out.samples.push_back(crop(parent, base + shift, m, 1));
    }
    return out;
}

double measured_overlap_ratio(const Dataset& augmented) {
    std::map<std::string, std::vector<const ElevationProfile*>> families;
    for (const auto& sample : augmented.samples) {
        const auto pos = sample.source_id.rfind("#crop");
        if (pos == std::string::npos) continue;
        families[sample.source_id.substr(0, pos)].push_back(&sample);
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (const auto& [parent, crops] : families) {
        for (std::size_t i = 0; i < crops.size(); ++i) {
            for (std::size_t j = i + 1; j < crops.size(); ++j) {
                total += overlap_ratio(*crops[i], *crops[j]);
                ++pairs;
            }
        }
    }
    if (pairs == 0) throw DataError("measured_overlap_ratio: no derived crop pairs found");
    return total / static_cast<double>(pairs);
}

double mean_same_class_signal_overlap(const Dataset& dataset, std::uint64_t seed,
                                      std::size_t max_pairs_per_label) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        if (dataset.samples[i].label) by_label[*dataset.samples[i].label].push_back(i);
    }

    double total = 0.0;
    std::size_t pairs = 0;
    std::uint64_t label_counter = 0;
    for (const auto& [label, idxs] : by_label) {
        if (idxs.size() < 2) continue;
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t i = 0; i < idxs.size(); ++i) {
            for (std::size_t j = i + 1; j < idxs.size(); ++j) candidates.push_back({idxs[i], idxs[j]});
        }
        if (candidates.size() > max_pairs_per_label) {
            Rng rng(derive_seed(seed, "overlap-pairs", label_counter));
            rng.shuffle(candidates);
            candidates.resize(max_pairs_per_label);
        }
        ++label_counter;
        for (const auto& [a, b] : candidates) {
            total += overlap_ratio(dataset.samples[a], dataset.samples[b]);
            ++pairs;
        }
    }
    return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

}  // namespace elev
