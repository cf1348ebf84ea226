#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "csnn/errors.hpp"

namespace csnn {

// IDX files as used by the MNIST distribution: big-endian magic and
// dimension header followed by raw unsigned bytes.
struct IdxImages {
    uint32_t count = 0;
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<uint8_t> pixels;  // count * rows * cols

    size_t pixels_per_image() const { return static_cast<size_t>(rows) * cols; }
    const uint8_t* image(size_t i) const { return pixels.data() + i * pixels_per_image(); }
};

struct IdxLabels {
    uint32_t count = 0;
    std::vector<uint8_t> labels;
};

IdxImages load_idx_images(const std::filesystem::path& path);
IdxLabels load_idx_labels(const std::filesystem::path& path);

struct Dataset {
    IdxImages images;
    IdxLabels labels;

    size_t size() const { return images.count; }
    // intensities in [0, 1]
    std::vector<double> image_intensities(size_t i) const;
    std::vector<std::vector<double>> all_intensities() const;
    std::vector<int32_t> all_labels() const;
};

// Loads and cross-checks an image/label pair.
Dataset load_dataset(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path);

}  // namespace csnn
