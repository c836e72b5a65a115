#pragma once

#include <memory>
#include <string>
#include <vector>

#include "elevinfer/matrix.hpp"

namespace elev {

// A trained classifier with its label order and preprocessing fingerprint
// frozen in. predict_proba rows always sum to 1 (checked); argmax ties go
// to the lowest label index.
class TrainedModel {
public:
    enum class Kind { svm, forest, mlp };

    virtual ~TrainedModel() = default;

    Kind kind() const { return kind_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t input_dim() const { return input_dim_; }

    const std::string& preprocessing_fingerprint() const { return preprocessing_fingerprint_; }
    void set_preprocessing_fingerprint(std::string fp) { preprocessing_fingerprint_ = std::move(fp); }

    // Throws UsageError on a feature-width mismatch.
    Matrix predict_proba(const Matrix& X) const;
    std::vector<std::size_t> predict(const Matrix& X) const;

    virtual std::string to_json() const = 0;

protected:
    TrainedModel(Kind kind, std::vector<std::string> labels, std::size_t input_dim)
        : kind_(kind), labels_(std::move(labels)), input_dim_(input_dim) {}

    virtual Matrix predict_proba_impl(const Matrix& X) const = 0;

    Kind kind_;
    std::vector<std::string> labels_;
    std::size_t input_dim_ = 0;
    std::string preprocessing_fingerprint_;
};

std::string to_string(TrainedModel::Kind kind);
TrainedModel::Kind model_kind_from_string(const std::string& s);

// Versioned JSON round-trip (parameters + config + label order +
// preprocessing fingerprint).
std::unique_ptr<TrainedModel> model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
std::unique_ptr<TrainedModel> load_model(const std::filesystem::path& path);

// argmax with ties resolved to the lowest index
std::size_t argmax_lowest(const double* row, std::size_t n);

}  // namespace elev
