#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "elevinfer/model.hpp"

namespace elev {

// Fully-connected network: ReLU hidden layers, softmax output, cross
// entropy with optional per-class weights, adaptive-moment optimizer and
// L2 regularization. Deterministic for a fixed seed.
struct MlpConfig {
    // Paper-faithful default depth; desk-scale runs usually override with
    // two 64-wide layers, which train reliably on small data.
    std::vector<std::size_t> hidden_layers = std::vector<std::size_t>(20, 64);
    double learning_rate = 0.001;
    int epochs = 200;
    double l2_penalty = 0.0001;
    std::size_t batch_size = 32;  // 0 = full batch
    std::optional<std::vector<double>> class_weights;
    std::uint64_t seed = 0;
    bool standardize = true;
};

std::unique_ptr<TrainedModel> train_mlp(const Matrix& X, const std::vector<std::size_t>& y,
                                        const std::vector<std::string>& label_order,
                                        const MlpConfig& config);

// Mean training loss per epoch.
const std::vector<double>& mlp_loss_history(const TrainedModel& model);

// Round-based fine-tuning: warm-started retraining over datasets with
// strictly growing label sets; new output rows are freshly initialized.
struct FineTuneRound {
    std::vector<std::string> labels;  // must extend the previous round's list
    Matrix X;
    std::vector<std::size_t> y;       // indices into labels
    std::optional<double> learning_rate;  // per-round overrides
    std::optional<int> epochs;
};

std::unique_ptr<TrainedModel> fine_tune(const std::vector<FineTuneRound>& rounds,
                                        const MlpConfig& base_config);

// Max relative error between analytic gradients and central finite
// differences over every parameter of a small network.
double mlp_gradient_check(const MlpConfig& config, const Matrix& X,
                          const std::vector<std::size_t>& y, std::size_t n_classes,
                          double fd_step = 1e-5);

}  // namespace elev
