#include "elevinfer/svm.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "elevinfer/error.hpp"
#include "elevinfer/kernels.hpp"
#include "model_internal.hpp"

namespace elev {

using nlohmann::json;

namespace {

void check_labels(const std::vector<std::size_t>& y, std::size_t n_classes) {
    if (n_classes < 2) throw DataError("svm: degenerate labels: need at least 2 classes");
    std::vector<std::size_t> counts(n_classes, 0);
    for (auto cls : y) {
        if (cls >= n_classes) throw DataError("svm: label index out of range");
        ++counts[cls];
    }
    for (std::size_t k = 0; k < n_classes; ++k) {
        if (counts[k] < 2) {
            throw DataError("svm: degenerate labels: class " + std::to_string(k) +
                            " has fewer than 2 samples");
        }
    }
}

void softmax_row(double* row, std::size_t n) {
    const double mx = kernels::max_value(row, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        row[i] = std::exp(row[i] - mx);
        total += row[i];
    }
    for (std::size_t i = 0; i < n; ++i) row[i] /= total;
}

class SvmModel final : public TrainedModel {
public:
    SvmModel(std::vector<std::string> labels, std::size_t input_dim,
             std::optional<StandardScaler> scaler, Matrix weights, std::vector<double> bias,
             SvmConfig config, std::vector<double> history)
        : TrainedModel(Kind::svm, std::move(labels), input_dim),
          scaler_(std::move(scaler)),
          weights_(std::move(weights)),
          bias_(std::move(bias)),
          config_(config),
          objective_history_(std::move(history)) {}

    Matrix predict_proba_impl(const Matrix& X) const override {
        const Matrix scaled = scaler_ ? scaler_->transform(X) : X;
        const std::size_t k = labels_.size();
        Matrix probs(scaled.rows, k);
        for (std::size_t i = 0; i < scaled.rows; ++i) {
            for (std::size_t c = 0; c < k; ++c) {
                probs.at(i, c) = kernels::dot(weights_.row(c), scaled.row(i), scaled.cols) + bias_[c];
            }
            softmax_row(probs.row(i), k);
        }
        return probs;
    }

    std::string to_json() const override {
        json doc;
        doc["version"] = 1;
        doc["kind"] = "svm";
        doc["labels"] = labels_;
        doc["input_dim"] = input_dim_;
        doc["preprocessing_fingerprint"] = preprocessing_fingerprint_;
        doc["config"] = {{"penalty", config_.penalty},
                         {"max_epochs", config_.max_epochs},
                         {"learning_rate", config_.learning_rate},
                         {"seed", config_.seed},
                         {"standardize", config_.standardize}};
        doc["params"]["weights"] = detail::matrix_to_json(weights_);
        doc["params"]["bias"] = bias_;
        if (scaler_) doc["params"]["scaler"] = detail::scaler_to_json(*scaler_);
        return doc.dump();
    }

    const std::vector<double>& objective_history() const { return objective_history_; }

private:
    std::optional<StandardScaler> scaler_;
    Matrix weights_;  // one row of coefficients per class
    std::vector<double> bias_;
    SvmConfig config_;
    std::vector<double> objective_history_;
};

}  // namespace

std::unique_ptr<TrainedModel> train_svm(const Matrix& X, const std::vector<std::size_t>& y,
                                        const std::vector<std::string>& label_order,
                                        const SvmConfig& config) {
    if (X.rows != y.size()) throw UsageError("svm: X rows != y length");
    if (X.rows == 0) throw DataError("svm: empty training set");
    const std::size_t k = label_order.size();
    check_labels(y, k);

    std::optional<StandardScaler> scaler;
    Matrix scaled = X;
    if (config.standardize) {
        scaler.emplace();
        scaler->fit(X);
        scaled = scaler->transform(X);
    }

    const std::size_t n = scaled.rows;
    const std::size_t d = scaled.cols;
    const double inv_n = 1.0 / static_cast<double>(n);

    Matrix weights(k, d);
    std::vector<double> bias(k, 0.0);
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(config.max_epochs));

    double lr = config.learning_rate;
    std::vector<double> grad(d);
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        double objective = 0.0;
        for (std::size_t cls = 0; cls < k; ++cls) {
            double* w = weights.row(cls);
            std::fill(grad.begin(), grad.end(), 0.0);
            kernels::axpy(2.0 * config.penalty, w, grad.data(), d);
            double grad_b = 0.0;
            double loss = config.penalty * kernels::dot(w, w, d);

            for (std::size_t i = 0; i < n; ++i) {
                const double target = y[i] == cls ? 1.0 : -1.0;
                const double score = kernels::dot(w, scaled.row(i), d) + bias[cls];
                const double margin = 1.0 - target * score;
                if (margin > 0.0) {
                    loss += margin * margin * inv_n;
                    const double coeff = -2.0 * target * margin * inv_n;
                    kernels::axpy(coeff, scaled.row(i), grad.data(), d);
                    grad_b += coeff;
                }
            }
            kernels::axpy(-lr, grad.data(), w, d);
            bias[cls] -= lr * grad_b;
            objective += loss;
        }
        history.push_back(objective / static_cast<double>(k));
        if (!std::isfinite(history.back())) {
            throw RuntimeError("svm: non-finite objective at epoch " + std::to_string(epoch));
        }
        // an increase means the step overshot; halve it from here on
        if (epoch > 0 && history[epoch] > history[epoch - 1]) lr *= 0.5;
    }

    return std::make_unique<SvmModel>(label_order, d, std::move(scaler), std::move(weights),
                                      std::move(bias), config, std::move(history));
}

const std::vector<double>& svm_objective_history(const TrainedModel& model) {
    const auto* svm = dynamic_cast<const SvmModel*>(&model);
    if (!svm) throw UsageError("svm_objective_history: not an SVM model");
    return svm->objective_history();
}

namespace detail {

std::unique_ptr<TrainedModel> svm_from_json(const json& doc) {
    SvmConfig config;
    const auto& c = doc.at("config");
    config.penalty = c.at("penalty").get<double>();
    config.max_epochs = c.at("max_epochs").get<int>();
    config.learning_rate = c.at("learning_rate").get<double>();
    config.seed = c.at("seed").get<std::uint64_t>();
    config.standardize = c.at("standardize").get<bool>();

    std::optional<StandardScaler> scaler;
    if (doc.at("params").contains("scaler")) {
        scaler = scaler_from_json(doc.at("params").at("scaler"));
    }
    auto model = std::make_unique<SvmModel>(
        doc.at("labels").get<std::vector<std::string>>(), doc.at("input_dim").get<std::size_t>(),
        std::move(scaler), matrix_from_json(doc.at("params").at("weights")),
        doc.at("params").at("bias").get<std::vector<double>>(), config, std::vector<double>{});
    model->set_preprocessing_fingerprint(doc.at("preprocessing_fingerprint").get<std::string>());
    return model;
}

}  // namespace detail

}  // namespace elev
