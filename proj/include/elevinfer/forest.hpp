#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "elevinfer/model.hpp"

namespace elev {

// Random forest over Gini-split decision trees grown to purity.
// predict_proba is exactly the mean of the per-tree class distributions.
//
// Determinism contract: for fixed (data, config, seed) the forest is
// bit-reproducible. Split search is order-insensitive for a fixed sample
// multiset (features scanned in index order, thresholds in value order,
// strict improvement only), so with bootstrap off and features_fraction 1
// the trees are invariant to permutations of the training rows. Bootstrap
// draws are positional and keyed by (seed, tree), so they are independent
// of sample count changes elsewhere but not of row order.
struct ForestConfig {
    int n_trees = 20;
    int max_depth = 0;              // 0 = unlimited (grow to purity)
    double features_fraction = 0.0;  // 0 = sqrt(d) default
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

std::unique_ptr<TrainedModel> train_forest(const Matrix& X, const std::vector<std::size_t>& y,
                                           const std::vector<std::string>& label_order,
                                           const ForestConfig& config);

// Per-tree class distributions for one feature row; lets tests check that
// the forest prediction is exactly the mean of its trees.
std::vector<std::vector<double>> forest_tree_votes(const TrainedModel& model, const double* row);

}  // namespace elev
