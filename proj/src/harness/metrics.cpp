#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "elevinfer/error.hpp"
#include "elevinfer/harness.hpp"

namespace elev {

using nlohmann::json;

MetricsReport compute_metrics(const std::vector<std::vector<std::size_t>>& confusion,
                              const std::vector<std::string>& labels) {
    const std::size_t k = confusion.size();
    if (k == 0) throw UsageError("compute_metrics: empty confusion matrix");
    for (const auto& row : confusion) {
        if (row.size() != k) throw UsageError("compute_metrics: confusion matrix must be square");
    }
    if (!labels.empty() && labels.size() != k) {
        throw UsageError("compute_metrics: label count does not match matrix size");
    }

    std::size_t total = 0, trace = 0;
    std::vector<std::size_t> row_sum(k, 0), col_sum(k, 0);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            total += confusion[r][c];
            row_sum[r] += confusion[r][c];
            col_sum[c] += confusion[r][c];
        }
        trace += confusion[r][r];
    }
    if (total == 0) throw UsageError("compute_metrics: confusion matrix is all zero");

    MetricsReport report;
    report.labels = labels;
    report.confusion = confusion;
    report.accuracy = static_cast<double>(trace) / static_cast<double>(total);

    double recall_sum = 0.0, specificity_sum = 0.0, f1_sum = 0.0;
    for (std::size_t cls = 0; cls < k; ++cls) {
        const auto tp = confusion[cls][cls];
        const auto fn = row_sum[cls] - tp;
        const auto fp = col_sum[cls] - tp;
        const auto tn = total - tp - fn - fp;
        const std::string name = labels.empty() ? std::to_string(cls) : labels[cls];

        double recall = 0.0;
        if (tp + fn > 0) {
            recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        } else {
            report.flags.push_back(name + ": zero support");
        }
        double specificity = 0.0;
        if (tn + fp > 0) {
            specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
        }
        double f1 = 0.0;
        if (tp + fp > 0 && tp + fn > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            if (precision + recall > 0.0) f1 = 2.0 * precision * recall / (precision + recall);
        } else if (tp + fp == 0 && tp + fn > 0) {
            report.flags.push_back(name + ": never predicted");
        }

        recall_sum += recall;
        specificity_sum += specificity;
        f1_sum += f1;
    }
    report.macro_recall = recall_sum / static_cast<double>(k);
    report.macro_specificity = specificity_sum / static_cast<double>(k);
    report.macro_f1 = f1_sum / static_cast<double>(k);
    return report;
}

std::string MetricsReport::to_json() const {
    json doc;
    doc["accuracy"] = accuracy;
    doc["macro_recall"] = macro_recall;
    doc["macro_specificity"] = macro_specificity;
    doc["macro_f1"] = macro_f1;
    doc["labels"] = labels;
    doc["confusion"] = confusion;
    doc["flags"] = flags;
    doc["fold_accuracies"] = fold_accuracies;
    doc["fold_fingerprints"] = fold_fingerprints;
    doc["fold_fingerprints_with_test"] = fold_fingerprints_with_test;
    return doc.dump(2);
}

ReportRow make_report_row(std::string experiment, std::string cell, const ExperimentSpec& spec,
                          const MetricsReport& metrics, int classes) {
    ReportRow row;
    row.experiment = std::move(experiment);
    row.cell = std::move(cell);
    row.representation = to_string(spec.representation);
    row.model = to_string(spec.model.kind);
    row.classes = classes;
    row.folds = spec.folds;
    row.seed = spec.seed;
    row.accuracy = metrics.accuracy;
    row.macro_recall = metrics.macro_recall;
    row.macro_specificity = metrics.macro_specificity;
    row.macro_f1 = metrics.macro_f1;
    return row;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_report_csv: cannot open " + path.string());
    out << "experiment,cell,representation,model,classes,folds,seed,"
           "accuracy,recall,specificity,f1\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.cell << ',' << r.representation << ',' << r.model << ','
            << r.classes << ',' << r.folds << ',' << r.seed << ',' << r.accuracy << ','
            << r.macro_recall << ',' << r.macro_specificity << ',' << r.macro_f1 << '\n';
    }
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("read_report_csv: cannot open " + path.string());
    std::vector<ReportRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 11) {
            throw DataError("read_report_csv: bad row in " + path.string() + ": " + line);
        }
        ReportRow r;
        r.experiment = fields[0];
        r.cell = fields[1];
        r.representation = fields[2];
        r.model = fields[3];
        r.classes = std::stoi(fields[4]);
        r.folds = std::stoi(fields[5]);
        r.seed = std::stoull(fields[6]);
        r.accuracy = std::stod(fields[7]);
        r.macro_recall = std::stod(fields[8]);
        r.macro_specificity = std::stod(fields[9]);
        r.macro_f1 = std::stod(fields[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_confusion_csv(const MetricsReport& metrics, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_confusion_csv: cannot open " + path.string());
    out << "true\\predicted";
    for (const auto& label : metrics.labels) out << ',' << label;
    out << '\n';
    for (std::size_t r = 0; r < metrics.confusion.size(); ++r) {
        out << metrics.labels[r];
        for (auto v : metrics.confusion[r]) out << ',' << v;
        out << '\n';
    }
}

}  // namespace elev
