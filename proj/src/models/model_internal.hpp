#pragma once

// Shared plumbing for the concrete model classes: JSON (de)serialization
// helpers and the per-kind factory hooks used by model_io.cpp.

#include <nlohmann/json.hpp>

#include "elevinfer/matrix.hpp"
#include "elevinfer/model.hpp"

namespace elev::detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m;
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.data = j.at("data").get<std::vector<double>>();
    return m;
}

inline nlohmann::json scaler_to_json(const StandardScaler& s) {
    return {{"mean", s.mean}, {"stddev", s.stddev}};
}

inline StandardScaler scaler_from_json(const nlohmann::json& j) {
    StandardScaler s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    return s;
}

std::unique_ptr<TrainedModel> svm_from_json(const nlohmann::json& doc);
std::unique_ptr<TrainedModel> forest_from_json(const nlohmann::json& doc);
std::unique_ptr<TrainedModel> mlp_from_json(const nlohmann::json& doc);

}  // namespace elev::detail
