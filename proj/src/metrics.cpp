#include "csnn/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <string>

namespace csnn {

const char* MetricsWriter::header() {
    return "iteration,estimated_accuracy,r_x,r_e,mean_weight,spikes_per_example";
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::trunc);
    if (!out_) throw DataError("metrics: cannot write " + path.string());
    out_ << header() << "\n";
    out_.flush();
}

void MetricsWriter::append(const MetricsRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g",
                  static_cast<unsigned long long>(row.iteration), row.estimated_accuracy,
                  row.r_x, row.r_e, row.mean_weight, row.spikes_per_example);
    out_ << buf << "\n";
    out_.flush();
    if (!out_) throw DataError("metrics: write failed for " + path_.string());
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("metrics: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("metrics: empty file " + path.string());
    if (line != MetricsWriter::header())
        throw DataError("metrics: unexpected header in " + path.string());
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        MetricsRow row;
        double* slots[5] = {&row.estimated_accuracy, &row.r_x, &row.r_e, &row.mean_weight,
                            &row.spikes_per_example};
        if (!std::getline(ss, field, ',')) throw DataError("metrics: short row in " + path.string());
        row.iteration = std::stoull(field);
        for (double* slot : slots) {
            if (!std::getline(ss, field, ','))
                throw DataError("metrics: short row in " + path.string());
            *slot = std::strtod(field.c_str(), nullptr);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace csnn
