#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace elev {

// Dense row-major matrix of doubles; the feature-matrix and parameter
// container for the classifiers.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Matrix&) const = default;
};

Matrix from_rows(const std::vector<std::vector<double>>& rows);

// header is optional (empty -> no header row)
void write_csv(const Matrix& m, const std::vector<std::string>& header,
               const std::filesystem::path& path);

// Per-column standardization fitted on training data; columns with zero
// spread pass through unscaled.
struct StandardScaler {
    std::vector<double> mean;
    std::vector<double> stddev;

    void fit(const Matrix& X);
    Matrix transform(const Matrix& X) const;
};

}  // namespace elev
