#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "elevinfer/model.hpp"

namespace elev {

// Linear one-vs-rest SVM trained by full-batch gradient descent on the
// squared hinge loss with an L2 penalty. Class probabilities (needed by the
// soft-voting ensemble) come from a softmax over the per-class margins.
struct SvmConfig {
    double penalty = 1e-3;       // L2 coefficient
    int max_epochs = 300;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    bool standardize = true;
};

// y holds indices into label_order. Throws DataError when fewer than two
// classes are present or any class has fewer than two samples.
std::unique_ptr<TrainedModel> train_svm(const Matrix& X, const std::vector<std::size_t>& y,
                                        const std::vector<std::string>& label_order,
                                        const SvmConfig& config);

// Mean squared-hinge objective per epoch (averaged over the K binary
// problems); recorded during training for convergence monitoring.
const std::vector<double>& svm_objective_history(const TrainedModel& model);

}  // namespace elev
