#include "csnn/idx.hpp"

#include <fstream>

namespace csnn {

namespace {

constexpr uint32_t images_magic = 0x00000803;
constexpr uint32_t labels_magic = 0x00000801;

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("idx: cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

uint32_t read_be32(const std::vector<uint8_t>& b, size_t off) {
    return (static_cast<uint32_t>(b[off]) << 24) | (static_cast<uint32_t>(b[off + 1]) << 16) |
           (static_cast<uint32_t>(b[off + 2]) << 8) | static_cast<uint32_t>(b[off + 3]);
}

}  // namespace

IdxImages load_idx_images(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 16) throw DataError("idx: truncated image header in " + path.string());
    if (read_be32(bytes, 0) != images_magic)
        throw DataError("idx: bad image magic in " + path.string());
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);
    const size_t expected = 16 + static_cast<size_t>(out.count) * out.rows * out.cols;
    if (bytes.size() != expected)
        throw DataError("idx: image payload size mismatch in " + path.string());
    out.pixels.assign(bytes.begin() + 16, bytes.end());
    return out;
}

IdxLabels load_idx_labels(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 8) throw DataError("idx: truncated label header in " + path.string());
    if (read_be32(bytes, 0) != labels_magic)
        throw DataError("idx: bad label magic in " + path.string());
    IdxLabels out;
    out.count = read_be32(bytes, 4);
    if (bytes.size() != 8 + static_cast<size_t>(out.count))
        throw DataError("idx: label payload size mismatch in " + path.string());
    out.labels.assign(bytes.begin() + 8, bytes.end());
    return out;
}

std::vector<double> Dataset::image_intensities(size_t i) const {
    const uint8_t* px = images.image(i);
    std::vector<double> out(images.pixels_per_image());
    for (size_t j = 0; j < out.size(); ++j) out[j] = px[j] / 255.0;
    return out;
}

std::vector<std::vector<double>> Dataset::all_intensities() const {
    std::vector<std::vector<double>> out;
    out.reserve(size());
    for (size_t i = 0; i < size(); ++i) out.push_back(image_intensities(i));
    return out;
}

std::vector<int32_t> Dataset::all_labels() const {
    return std::vector<int32_t>(labels.labels.begin(), labels.labels.end());
}

Dataset load_dataset(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path) {
    Dataset ds;
    ds.images = load_idx_images(images_path);
    ds.labels = load_idx_labels(labels_path);
    if (ds.images.count != ds.labels.count)
        throw DataError("idx: image/label counts differ (" + std::to_string(ds.images.count) +
                        " vs " + std::to_string(ds.labels.count) + ")");
    for (uint8_t l : ds.labels.labels)
        if (l > 9) throw DataError("idx: label value out of range");
    return ds;
}

}  // namespace csnn
