#include "csnn/pgm.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace csnn {

void write_pgm(const std::filesystem::path& path, uint32_t width, uint32_t height,
               std::span<const uint8_t> pixels) {
    if (pixels.size() != static_cast<size_t>(width) * height)
        throw std::invalid_argument("write_pgm: pixel count does not match dimensions");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("pgm: cannot write " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw DataError("pgm: write failed for " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("pgm: cannot open " + path.string());
    std::string format;
    uint32_t width = 0, height = 0, maxval = 0;
    in >> format >> width >> height >> maxval;
    if (format != "P5" || maxval != 255)
        throw DataError("pgm: unsupported format in " + path.string());
    in.get();  // single whitespace after maxval
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw DataError("pgm: truncated payload in " + path.string());
    return img;
}

GrayImage render_tile_grid(const std::vector<std::vector<uint8_t>>& tiles, uint32_t rows,
                           uint32_t cols, uint32_t tile_h, uint32_t tile_w, uint32_t pad) {
    if (tiles.size() > static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("render_tile_grid: more tiles than grid cells");
    for (const auto& t : tiles)
        if (t.size() != static_cast<size_t>(tile_h) * tile_w)
            throw std::invalid_argument("render_tile_grid: tile size mismatch");
    GrayImage img;
    img.width = cols * (tile_w + pad) + pad;
    img.height = rows * (tile_h + pad) + pad;
    img.pixels.assign(static_cast<size_t>(img.width) * img.height, 0);
    for (size_t t = 0; t < tiles.size(); ++t) {
        const uint32_t gr = static_cast<uint32_t>(t) / cols;
        const uint32_t gc = static_cast<uint32_t>(t) % cols;
        const uint32_t y0 = gr * (tile_h + pad) + pad;
        const uint32_t x0 = gc * (tile_w + pad) + pad;
        for (uint32_t y = 0; y < tile_h; ++y)
            for (uint32_t x = 0; x < tile_w; ++x)
                img.pixels[static_cast<size_t>(y0 + y) * img.width + x0 + x] =
                    tiles[t][static_cast<size_t>(y) * tile_w + x];
    }
    return img;
}

std::vector<uint8_t> weights_to_gray(std::span<const double> w, double w_max) {
    if (w_max <= 0) throw std::invalid_argument("weights_to_gray: w_max must be positive");
    std::vector<uint8_t> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        double v = std::lround(w[i] / w_max * 255.0);
        if (v < 0) v = 0;
        if (v > 255) v = 255;
        out[i] = static_cast<uint8_t>(v);
    }
    return out;
}

GrayImage filter_grid(const Network& net, uint32_t pad) {
    const SynapseGroup& g = net.projections[net.input_projection()];
    const double w_max = g.plast.w_max;
    std::vector<std::vector<uint8_t>> tiles;
    uint32_t tile_h = 0, tile_w = 0, rows = 0, cols = 0;

    if (net.spec.kind == NetworkSpec::Kind::baseline) {
        tile_h = tile_w = static_cast<uint32_t>(std::lround(std::sqrt(net.n_input())));
        if (tile_h * tile_w != net.n_input())
            throw std::invalid_argument("filter_grid: input is not square");
        const uint32_t n = net.n_exc();
        cols = static_cast<uint32_t>(std::ceil(std::sqrt(static_cast<double>(n))));
        rows = (n + cols - 1) / cols;
        for (uint32_t j = 0; j < n; ++j)
            tiles.push_back(weights_to_gray(incoming_weights(g, j), w_max));
    } else {
        const auto& conv = net.spec.conv;
        tile_h = tile_w = conv.kernel;
        if (conv.shared_weights) {
            rows = 1;
            cols = conv.n_patches;
            const uint32_t k2 = conv.kernel * conv.kernel;
            for (uint32_t p = 0; p < conv.n_patches; ++p) {
                std::span<const double> w(g.weights.data() + static_cast<size_t>(p) * k2, k2);
                tiles.push_back(weights_to_gray(w, w_max));
            }
        } else {
            rows = conv.n_patches;
            cols = conv.n_locations();
            for (uint32_t j = 0; j < net.n_exc(); ++j)
                tiles.push_back(weights_to_gray(incoming_weights(g, j), w_max));
        }
    }
    return render_tile_grid(tiles, rows, cols, tile_h, tile_w, pad);
}

void write_filter_grid(const Network& net, const std::filesystem::path& path, uint32_t pad) {
    const GrayImage img = filter_grid(net, pad);
    write_pgm(path, img.width, img.height, img.pixels);
}

}  // namespace csnn
