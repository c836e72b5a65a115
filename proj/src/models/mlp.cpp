#include "elevinfer/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "elevinfer/error.hpp"
#include "elevinfer/kernels.hpp"
#include "elevinfer/rng.hpp"
#include "model_internal.hpp"

namespace elev {

using nlohmann::json;

namespace {

struct Layer {
    Matrix weights;           // out x in (transposed storage: rows are output units)
    std::vector<double> bias;  // out
};

// He-normal init for ReLU stacks; the output layer uses the same scheme.
Layer init_layer(std::size_t in, std::size_t out, Rng& rng) {
    Layer layer;
    layer.weights = Matrix(out, in);
    layer.bias.assign(out, 0.0);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& w : layer.weights.data) w = rng.gaussian() * scale;
    return layer;
}

struct Net {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.front().weights.cols; }
    std::size_t output_dim() const { return layers.back().weights.rows; }

    // activations[0] = input batch, activations.back() = softmax probs
    std::vector<Matrix> forward(const Matrix& X) const {
        std::vector<Matrix> acts;
        acts.reserve(layers.size() + 1);
        acts.push_back(X);
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const auto& layer = layers[li];
            const Matrix& in = acts.back();
            Matrix out(in.rows, layer.weights.rows);
            for (std::size_t i = 0; i < in.rows; ++i) {
                for (std::size_t o = 0; o < layer.weights.rows; ++o) {
                    out.at(i, o) =
                        kernels::dot(layer.weights.row(o), in.row(i), in.cols) + layer.bias[o];
                }
            }
            if (li + 1 < layers.size()) {
                kernels::relu(out.data.data(), out.data.data(), out.data.size());
            } else {
                for (std::size_t i = 0; i < out.rows; ++i) {
                    double* row = out.row(i);
                    const double mx = kernels::max_value(row, out.cols);
                    double total = 0.0;
                    for (std::size_t c = 0; c < out.cols; ++c) {
                        row[c] = std::exp(row[c] - mx);
                        total += row[c];
                    }
                    kernels::scale(row, 1.0 / total, out.cols);
                }
            }
            acts.push_back(std::move(out));
        }
        return acts;
    }

    // Weighted cross entropy (weights normalized so equal weights reduce to
    // the plain mean) plus 0.5 * l2 * sum of squared weights.
    double loss(const std::vector<Matrix>& acts, const std::vector<std::size_t>& y,
                const std::vector<double>& sample_weights, double weight_total,
                double l2_penalty) const {
        const Matrix& probs = acts.back();
        double ce = 0.0;
        for (std::size_t i = 0; i < probs.rows; ++i) {
            const double p = std::max(probs.at(i, y[i]), 1e-300);
            ce -= sample_weights[i] * std::log(p);
        }
        ce /= weight_total;
        double reg = 0.0;
        for (const auto& layer : layers) {
            reg += kernels::dot(layer.weights.data.data(), layer.weights.data.data(),
                                layer.weights.data.size());
        }
        return ce + 0.5 * l2_penalty * reg;
    }

    std::vector<Layer> gradients(const std::vector<Matrix>& acts, const std::vector<std::size_t>& y,
                                 const std::vector<double>& sample_weights, double weight_total,
                                 double l2_penalty) const {
        std::vector<Layer> grads(layers.size());
        for (std::size_t li = 0; li < layers.size(); ++li) {
            grads[li].weights = Matrix(layers[li].weights.rows, layers[li].weights.cols);
            grads[li].bias.assign(layers[li].bias.size(), 0.0);
        }

        const Matrix& probs = acts.back();
        Matrix delta = probs;  // dL/dz for the softmax+CE output layer
        for (std::size_t i = 0; i < delta.rows; ++i) {
            delta.at(i, y[i]) -= 1.0;
            kernels::scale(delta.row(i), sample_weights[i] / weight_total, delta.cols);
        }

        for (std::size_t li = layers.size(); li-- > 0;) {
            const Matrix& in = acts[li];
            auto& grad = grads[li];
            for (std::size_t i = 0; i < delta.rows; ++i) {
                for (std::size_t o = 0; o < delta.cols; ++o) {
                    const double d = delta.at(i, o);
                    if (d != 0.0) kernels::axpy(d, in.row(i), grad.weights.row(o), in.cols);
                    grad.bias[o] += d;
                }
            }
            kernels::axpy(l2_penalty, layers[li].weights.data.data(), grad.weights.data.data(),
                          grad.weights.data.size());

            if (li == 0) break;
            Matrix prev_delta(delta.rows, in.cols);
            for (std::size_t i = 0; i < delta.rows; ++i) {
                for (std::size_t o = 0; o < delta.cols; ++o) {
                    const double d = delta.at(i, o);
                    if (d != 0.0) {
                        kernels::axpy(d, layers[li].weights.row(o), prev_delta.row(i), in.cols);
                    }
                }
                // ReLU mask: in == 0 means the unit never fired
                for (std::size_t c = 0; c < in.cols; ++c) {
                    if (in.at(i, c) <= 0.0) prev_delta.at(i, c) = 0.0;
                }
            }
            delta = std::move(prev_delta);
        }
        return grads;
    }
};

struct AdamState {
    std::vector<Layer> m;
    std::vector<Layer> v;
    long t = 0;

    void init(const Net& net) {
        m.clear();
        v.clear();
        for (const auto& layer : net.layers) {
            Layer zero;
            zero.weights = Matrix(layer.weights.rows, layer.weights.cols);
            zero.bias.assign(layer.bias.size(), 0.0);
            m.push_back(zero);
            v.push_back(std::move(zero));
        }
        t = 0;
    }

    void step(Net& net, const std::vector<Layer>& grads, double lr) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t li = 0; li < net.layers.size(); ++li) {
            auto update = [&](double& w, double& mm, double& vv, double g) {
                mm = beta1 * mm + (1.0 - beta1) * g;
                vv = beta2 * vv + (1.0 - beta2) * g * g;
                w -= lr * (mm / bc1) / (std::sqrt(vv / bc2) + eps);
            };
            auto& layer = net.layers[li];
            for (std::size_t j = 0; j < layer.weights.data.size(); ++j) {
                update(layer.weights.data[j], m[li].weights.data[j], v[li].weights.data[j],
                       grads[li].weights.data[j]);
            }
            for (std::size_t j = 0; j < layer.bias.size(); ++j) {
                update(layer.bias[j], m[li].bias[j], v[li].bias[j], grads[li].bias[j]);
            }
        }
    }
};

std::vector<double> per_sample_weights(const std::vector<std::size_t>& y,
                                       const std::optional<std::vector<double>>& class_weights,
                                       std::size_t n_classes) {
    std::vector<double> out(y.size(), 1.0);
    if (class_weights) {
        if (class_weights->size() != n_classes) {
            throw UsageError("mlp: class_weights length must equal the class count");
        }
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = (*class_weights)[y[i]];
    }
    return out;
}

void check_labels_mlp(const std::vector<std::size_t>& y, std::size_t n_classes, bool allow_single) {
    if (n_classes < 1 || (!allow_single && n_classes < 2)) {
        throw DataError("mlp: degenerate labels: need at least 2 classes");
    }
    std::vector<std::size_t> counts(n_classes, 0);
    for (auto cls : y) {
        if (cls >= n_classes) throw DataError("mlp: label index out of range");
        ++counts[cls];
    }
    for (std::size_t cls = 0; cls < n_classes; ++cls) {
        if (counts[cls] < 2) {
            throw DataError("mlp: degenerate labels: class " + std::to_string(cls) +
                            " has fewer than 2 samples");
        }
    }
}

// One training run over an existing net (shared by train_mlp and the
// fine-tuning rounds).
std::vector<double> run_training(Net& net, const Matrix& X, const std::vector<std::size_t>& y,
                                 const MlpConfig& config, double lr, int epochs,
                                 std::uint64_t shuffle_seed) {
    const auto weights = per_sample_weights(y, config.class_weights, net.output_dim());
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(epochs));

    AdamState adam;
    adam.init(net);

    const std::size_t batch =
        config.batch_size == 0 ? X.rows : std::min<std::size_t>(config.batch_size, X.rows);

    std::vector<std::size_t> order(X.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng rng(derive_seed(shuffle_seed, "epoch", static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < X.rows; start += batch) {
            const std::size_t stop = std::min(start + batch, X.rows);
            Matrix bx(stop - start, X.cols);
            std::vector<std::size_t> by(stop - start);
            std::vector<double> bw(stop - start);
            double bw_total = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const auto src = order[i];
                std::copy(X.row(src), X.row(src) + X.cols, bx.row(i - start));
                by[i - start] = y[src];
                bw[i - start] = weights[src];
                bw_total += weights[src];
            }

            const auto acts = net.forward(bx);
            epoch_loss += net.loss(acts, by, bw, bw_total, config.l2_penalty);
            ++n_batches;
            const auto grads = net.gradients(acts, by, bw, bw_total, config.l2_penalty);
            adam.step(net, grads, lr);
        }
        history.push_back(epoch_loss / static_cast<double>(n_batches));
        if (!std::isfinite(history.back())) {
            throw RuntimeError("mlp: non-finite loss at epoch " + std::to_string(epoch) +
                               " (lr=" + std::to_string(lr) + ", batch=" + std::to_string(batch) +
                               ")");
        }
    }
    return history;
}

class MlpModel final : public TrainedModel {
public:
    MlpModel(std::vector<std::string> labels, std::size_t input_dim,
             std::optional<StandardScaler> scaler, Net net, MlpConfig config,
             std::vector<double> history)
        : TrainedModel(Kind::mlp, std::move(labels), input_dim),
          scaler_(std::move(scaler)),
          net_(std::move(net)),
          config_(std::move(config)),
          loss_history_(std::move(history)) {}

    Matrix predict_proba_impl(const Matrix& X) const override {
        const Matrix scaled = scaler_ ? scaler_->transform(X) : X;
        return net_.forward(scaled).back();
    }

    std::string to_json() const override {
        json doc;
        doc["version"] = 1;
        doc["kind"] = "mlp";
        doc["labels"] = labels_;
        doc["input_dim"] = input_dim_;
        doc["preprocessing_fingerprint"] = preprocessing_fingerprint_;
        doc["config"] = {{"hidden_layers", config_.hidden_layers},
                         {"learning_rate", config_.learning_rate},
                         {"epochs", config_.epochs},
                         {"l2_penalty", config_.l2_penalty},
                         {"batch_size", config_.batch_size},
                         {"seed", config_.seed},
                         {"standardize", config_.standardize}};
        if (config_.class_weights) doc["config"]["class_weights"] = *config_.class_weights;
        json layers = json::array();
        for (const auto& layer : net_.layers) {
            layers.push_back(
                {{"weights", detail::matrix_to_json(layer.weights)}, {"bias", layer.bias}});
        }
        doc["params"]["layers"] = std::move(layers);
        if (scaler_) doc["params"]["scaler"] = detail::scaler_to_json(*scaler_);
        return doc.dump();
    }

    const std::vector<double>& loss_history() const { return loss_history_; }

private:
    std::optional<StandardScaler> scaler_;
    Net net_;
    MlpConfig config_;
    std::vector<double> loss_history_;
};

Net build_net(std::size_t input_dim, const std::vector<std::size_t>& hidden,
              std::size_t n_classes, Rng& rng) {
    Net net;
    std::size_t in = input_dim;
    for (auto width : hidden) {
        if (width < 1) throw UsageError("mlp: hidden layer width must be >= 1");
        net.layers.push_back(init_layer(in, width, rng));
        in = width;
    }
    net.layers.push_back(init_layer(in, n_classes, rng));
    return net;
}

}  // namespace

std::unique_ptr<TrainedModel> train_mlp(const Matrix& X, const std::vector<std::size_t>& y,
                                        const std::vector<std::string>& label_order,
                                        const MlpConfig& config) {
    if (X.rows != y.size()) throw UsageError("mlp: X rows != y length");
    if (X.rows == 0) throw DataError("mlp: empty training set");
    check_labels_mlp(y, label_order.size(), /*allow_single=*/false);

    std::optional<StandardScaler> scaler;
    Matrix scaled = X;
    if (config.standardize) {
        scaler.emplace();
        scaler->fit(X);
        scaled = scaler->transform(X);
    }

    Rng init_rng(derive_seed(config.seed, "mlp-init"));
    Net net = build_net(scaled.cols, config.hidden_layers, label_order.size(), init_rng);
    auto history = run_training(net, scaled, y, config, config.learning_rate, config.epochs,
                                derive_seed(config.seed, "mlp-shuffle"));

    return std::make_unique<MlpModel>(label_order, X.cols, std::move(scaler), std::move(net),
                                      config, std::move(history));
}

const std::vector<double>& mlp_loss_history(const TrainedModel& model) {
    const auto* mlp = dynamic_cast<const MlpModel*>(&model);
    if (!mlp) throw UsageError("mlp_loss_history: not an MLP model");
    return mlp->loss_history();
}

std::unique_ptr<TrainedModel> fine_tune(const std::vector<FineTuneRound>& rounds,
                                        const MlpConfig& base_config) {
    if (rounds.empty()) throw UsageError("fine_tune: no rounds");
    for (std::size_t r = 1; r < rounds.size(); ++r) {
        const auto& prev = rounds[r - 1].labels;
        const auto& cur = rounds[r].labels;
        const bool grows = cur.size() > prev.size() &&
                           std::equal(prev.begin(), prev.end(), cur.begin());
        if (!grows) {
            throw UsageError("fine_tune: schedule violation: round " + std::to_string(r) +
                             " label set must strictly extend the previous round");
        }
    }

    // Scaler is fitted on the first round only and kept frozen so that the
    // warm-started parameters keep their meaning across rounds.
    std::optional<StandardScaler> scaler;
    if (base_config.standardize) {
        scaler.emplace();
        scaler->fit(rounds[0].X);
    }

    // rounds are balanced by construction; per-class weighting does not
    // compose with a growing label set
    MlpConfig round_config = base_config;
    round_config.class_weights.reset();

    Rng init_rng(derive_seed(base_config.seed, "mlp-init"));
    Net net = build_net(rounds[0].X.cols, base_config.hidden_layers, rounds[0].labels.size(),
                        init_rng);

    std::vector<double> history;
    for (std::size_t r = 0; r < rounds.size(); ++r) {
        const auto& round = rounds[r];
        if (round.X.cols != net.input_dim()) {
            throw UsageError("fine_tune: round " + std::to_string(r) + " feature width mismatch");
        }
        if (r > 0) {
            // resize the output layer: keep existing rows, init new class rows
            Rng grow_rng(derive_seed(base_config.seed, "mlp-grow", static_cast<std::uint64_t>(r)));
            auto& out = net.layers.back();
            const std::size_t in = out.weights.cols;
            Layer grown = init_layer(in, round.labels.size(), grow_rng);
            for (std::size_t o = 0; o < out.weights.rows; ++o) {
                std::copy(out.weights.row(o), out.weights.row(o) + in, grown.weights.row(o));
                grown.bias[o] = out.bias[o];
            }
            out = std::move(grown);
        }
        check_labels_mlp(round.y, round.labels.size(), /*allow_single=*/true);

        const Matrix scaled = scaler ? scaler->transform(round.X) : round.X;
        const double lr = round.learning_rate.value_or(base_config.learning_rate);
        const int epochs = round.epochs.value_or(base_config.epochs);
        // round 0 shares train_mlp's shuffle stream so a 1-round schedule
        // reduces to plain training exactly
        const std::uint64_t shuffle_seed =
            r == 0 ? derive_seed(base_config.seed, "mlp-shuffle")
                   : derive_seed(base_config.seed, "mlp-shuffle", static_cast<std::uint64_t>(r));
        auto round_history = run_training(net, scaled, round.y, round_config, lr, epochs, shuffle_seed);
        history.insert(history.end(), round_history.begin(), round_history.end());
    }

    return std::make_unique<MlpModel>(rounds.back().labels, rounds.back().X.cols, std::move(scaler),
                                      std::move(net), base_config, std::move(history));
}

double mlp_gradient_check(const MlpConfig& config, const Matrix& X,
                          const std::vector<std::size_t>& y, std::size_t n_classes,
                          double fd_step) {
    Rng init_rng(derive_seed(config.seed, "mlp-init"));
    Net net = build_net(X.cols, config.hidden_layers, n_classes, init_rng);
    const auto weights = per_sample_weights(y, config.class_weights, n_classes);
    double weight_total = 0.0;
    for (double w : weights) weight_total += w;

    const auto analytic = net.gradients(net.forward(X), y, weights, weight_total, config.l2_penalty);

    double max_rel = 0.0;
    auto probe = [&](double& param, double analytic_grad) {
        const double saved = param;
        param = saved + fd_step;
        const double up = net.loss(net.forward(X), y, weights, weight_total, config.l2_penalty);
        param = saved - fd_step;
        const double down = net.loss(net.forward(X), y, weights, weight_total, config.l2_penalty);
        param = saved;
        const double numeric = (up - down) / (2.0 * fd_step);
        const double denom = std::max(std::abs(analytic_grad) + std::abs(numeric), 1e-8);
        max_rel = std::max(max_rel, std::abs(analytic_grad - numeric) / denom);
    };

    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        auto& layer = net.layers[li];
        for (std::size_t j = 0; j < layer.weights.data.size(); ++j) {
            probe(layer.weights.data[j], analytic[li].weights.data[j]);
        }
        for (std::size_t j = 0; j < layer.bias.size(); ++j) {
            probe(layer.bias[j], analytic[li].bias[j]);
        }
    }
    return max_rel;
}

namespace detail {

std::unique_ptr<TrainedModel> mlp_from_json(const json& doc) {
    MlpConfig config;
    const auto& c = doc.at("config");
    config.hidden_layers = c.at("hidden_layers").get<std::vector<std::size_t>>();
    config.learning_rate = c.at("learning_rate").get<double>();
    config.epochs = c.at("epochs").get<int>();
    config.l2_penalty = c.at("l2_penalty").get<double>();
    config.batch_size = c.at("batch_size").get<std::size_t>();
    config.seed = c.at("seed").get<std::uint64_t>();
    config.standardize = c.at("standardize").get<bool>();
    if (c.contains("class_weights")) {
        config.class_weights = c.at("class_weights").get<std::vector<double>>();
    }

    Net net;
    for (const auto& lj : doc.at("params").at("layers")) {
        Layer layer;
        layer.weights = matrix_from_json(lj.at("weights"));
        layer.bias = lj.at("bias").get<std::vector<double>>();
        net.layers.push_back(std::move(layer));
    }
    std::optional<StandardScaler> scaler;
    if (doc.at("params").contains("scaler")) {
        scaler = scaler_from_json(doc.at("params").at("scaler"));
    }
    auto model = std::make_unique<MlpModel>(doc.at("labels").get<std::vector<std::string>>(),
                                            doc.at("input_dim").get<std::size_t>(),
                                            std::move(scaler), std::move(net), std::move(config),
                                            std::vector<double>{});
    model->set_preprocessing_fingerprint(doc.at("preprocessing_fingerprint").get<std::string>());
    return model;
}

}  // namespace detail

}  // namespace elev
