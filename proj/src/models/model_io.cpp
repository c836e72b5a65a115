#include <cmath>
#include <fstream>

#include "elevinfer/error.hpp"
#include "elevinfer/model.hpp"
#include "model_internal.hpp"

namespace elev {

using nlohmann::json;

std::size_t argmax_lowest(const double* row, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (row[i] > row[best]) best = i;  // strict > keeps the lowest index on ties
    }
    return best;
}

Matrix TrainedModel::predict_proba(const Matrix& X) const {
    if (X.cols != input_dim_) {
        throw UsageError("predict_proba: feature width " + std::to_string(X.cols) +
                         " does not match training width " + std::to_string(input_dim_));
    }
    Matrix probs = predict_proba_impl(X);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        double total = 0.0;
        for (std::size_t c = 0; c < probs.cols; ++c) total += probs.at(i, c);
        if (std::abs(total - 1.0) > 1e-6) {
            throw RuntimeError("predict_proba: row " + std::to_string(i) + " sums to " +
                               std::to_string(total));
        }
    }
    return probs;
}

std::vector<std::size_t> TrainedModel::predict(const Matrix& X) const {
    const Matrix probs = predict_proba(X);
    std::vector<std::size_t> out(probs.rows);
    for (std::size_t i = 0; i < probs.rows; ++i) out[i] = argmax_lowest(probs.row(i), probs.cols);
    return out;
}

std::string to_string(TrainedModel::Kind kind) {
    switch (kind) {
        case TrainedModel::Kind::svm: return "svm";
        case TrainedModel::Kind::forest: return "forest";
        case TrainedModel::Kind::mlp: return "mlp";
    }
    return "svm";
}

TrainedModel::Kind model_kind_from_string(const std::string& s) {
    if (s == "svm") return TrainedModel::Kind::svm;
    if (s == "forest" || s == "rf") return TrainedModel::Kind::forest;
    if (s == "mlp") return TrainedModel::Kind::mlp;
    throw UsageError("unknown model kind '" + s + "'");
}

std::unique_ptr<TrainedModel> model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model: bad JSON: ") + e.what());
    }
    if (doc.value("version", 0) != 1) throw DataError("model: unsupported version");
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "svm") return detail::svm_from_json(doc);
    if (kind == "forest") return detail::forest_from_json(doc);
    if (kind == "mlp") return detail::mlp_from_json(doc);
    throw DataError("model: unknown kind '" + kind + "'");
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("save_model: cannot open " + path.string());
    out << model.to_json() << "\n";
}

std::unique_ptr<TrainedModel> load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_model: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace elev
