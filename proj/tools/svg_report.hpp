#pragma once

#include <filesystem>
#include <vector>

#include "elevinfer/harness.hpp"

namespace elev::cli {

// Grouped bar chart of accuracy per (experiment cell, representation,
// model); the chart analog of the evaluation tables.
void write_accuracy_chart(const std::vector<ReportRow>& rows,
                          const std::filesystem::path& path);

}  // namespace elev::cli
