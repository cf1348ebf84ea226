#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "csnn/errors.hpp"

namespace csnn {

struct MetricsRow {
    uint64_t iteration = 0;
    double estimated_accuracy = 0;  // nan until two label windows exist
    double r_x = 0;
    double r_e = 0;
    double mean_weight = 0;
    double spikes_per_example = 0;
};

// Append-only CSV with a fixed header; every row is flushed so partial runs
// stay readable.
class MetricsWriter {
public:
    explicit MetricsWriter(const std::filesystem::path& path);
    void append(const MetricsRow& row);

    static const char* header();

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

}  // namespace csnn
