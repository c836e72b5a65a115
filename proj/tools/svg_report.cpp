#include "svg_report.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "elevinfer/error.hpp"

namespace elev::cli {

namespace {

const char* kBarColors[] = {"#e6194b", "#f58231", "#3cb44b", "#4363d8",
                            "#911eb4", "#46f0f0", "#f032e6", "#808000"};

}  // namespace

void write_accuracy_chart(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) throw DataError("write_accuracy_chart: no report rows");

    // group bars by experiment cell, color by representation/model pair
    std::map<std::string, std::vector<const ReportRow*>> groups;
    std::map<std::string, std::size_t> series;
    for (const auto& row : rows) {
        groups[row.experiment + ":" + row.cell].push_back(&row);
        const auto key = row.representation + "+" + row.model;
        if (!series.count(key)) {
            const auto next = series.size();
            series[key] = next;
        }
    }

    const int bar_w = 26;
    const int gap = 10;
    const int group_gap = 34;
    const int chart_h = 300;
    const int margin_left = 60;
    const int margin_top = 40;
    const int label_band = 70;

    int width = margin_left + group_gap;
    for (const auto& [name, members] : groups) {
        width += static_cast<int>(members.size()) * (bar_w + gap) + group_gap;
    }
    width = std::max(width, 360);
    const int height = margin_top + chart_h + label_band;

    std::ofstream out(path);
    if (!out) throw DataError("write_accuracy_chart: cannot open " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<text x=\"" << margin_left << "\" y=\"20\" font-size=\"14\">accuracy by cell / "
           "representation+model</text>\n";

    // y axis with gridlines every 0.25
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = tick / 4.0;
        const int y = margin_top + static_cast<int>((1.0 - frac) * chart_h);
        out << "<line x1=\"" << margin_left << "\" y1=\"" << y << "\" x2=\"" << width - 10
            << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << margin_left - 35 << "\" y=\"" << y + 4 << "\">" << frac
            << "</text>\n";
    }

    int x = margin_left + group_gap;
    for (const auto& [name, members] : groups) {
        const int group_start = x;
        for (const auto* row : members) {
            const auto key = row->representation + "+" + row->model;
            const int h = static_cast<int>(row->accuracy * chart_h);
            const int y = margin_top + chart_h - h;
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w << "\" height=\""
                << h << "\" fill=\"" << kBarColors[series[key] % 8] << "\"><title>" << name << " "
                << key << " = " << row->accuracy << "</title></rect>\n";
            out << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << y - 4
                << "\" text-anchor=\"middle\" font-size=\"9\">"
                << static_cast<int>(row->accuracy * 100 + 0.5) << "</text>\n";
            out << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << margin_top + chart_h + 12
                << "\" text-anchor=\"middle\" font-size=\"8\" transform=\"rotate(45 "
                << x + bar_w / 2 << " " << margin_top + chart_h + 12 << ")\">" << key
                << "</text>\n";
            x += bar_w + gap;
        }
        out << "<text x=\"" << (group_start + x - gap) / 2 << "\" y=\"" << height - 8
            << "\" text-anchor=\"middle\" font-size=\"11\">" << name << "</text>\n";
        x += group_gap;
    }
    out << "</svg>\n";
}

}  // namespace elev::cli
