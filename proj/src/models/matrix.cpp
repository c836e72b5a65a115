#include "elevinfer/matrix.hpp"

#include <cmath>
#include <fstream>

#include "elevinfer/error.hpp"

namespace elev {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    if (rows.empty()) return m;
    m.rows = rows.size();
    m.cols = rows[0].size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& r : rows) {
        if (r.size() != m.cols) throw DataError("from_rows: ragged rows");
        m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
}

void write_csv(const Matrix& m, const std::vector<std::string>& header,
               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_csv: cannot open " + path.string());
    out.precision(12);
    if (!header.empty()) {
        if (header.size() != m.cols) throw UsageError("write_csv: header width mismatch");
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c) out << ',';
            // entries may contain spaces but never commas/quotes
            out << '"' << header[c] << '"';
        }
        out << '\n';
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) out << ',';
            out << m.at(r, c);
        }
        out << '\n';
    }
}

void StandardScaler::fit(const Matrix& X) {
    mean.assign(X.cols, 0.0);
    stddev.assign(X.cols, 1.0);
    if (X.rows == 0) return;
    for (std::size_t r = 0; r < X.rows; ++r) {
        for (std::size_t c = 0; c < X.cols; ++c) mean[c] += X.at(r, c);
    }
    for (auto& m : mean) m /= static_cast<double>(X.rows);
    std::vector<double> var(X.cols, 0.0);
    for (std::size_t r = 0; r < X.rows; ++r) {
        for (std::size_t c = 0; c < X.cols; ++c) {
            const double d = X.at(r, c) - mean[c];
            var[c] += d * d;
        }
    }
    for (std::size_t c = 0; c < X.cols; ++c) {
        const double s = std::sqrt(var[c] / static_cast<double>(X.rows));
        stddev[c] = s > 0.0 ? s : 1.0;
    }
}

Matrix StandardScaler::transform(const Matrix& X) const {
    if (X.cols != mean.size()) throw UsageError("scaler: width mismatch");
    Matrix out(X.rows, X.cols);
    for (std::size_t r = 0; r < X.rows; ++r) {
        for (std::size_t c = 0; c < X.cols; ++c) {
            out.at(r, c) = (X.at(r, c) - mean[c]) / stddev[c];
        }
    }
    return out;
}

}  // namespace elev
