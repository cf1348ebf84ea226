#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "csnn/network.hpp"

namespace csnn {

// Binary (P5) PGM, maxval 255.
void write_pgm(const std::filesystem::path& path, uint32_t width, uint32_t height,
               std::span<const uint8_t> pixels);

struct GrayImage {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<uint8_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);

// Tile a set of equally sized grayscale tiles onto a rows x cols grid with
// `pad` background pixels around and between tiles. Missing tiles (when
// rows * cols exceeds the tile count) stay background. Image size is
// cols * (tile_w + pad) + pad  by  rows * (tile_h + pad) + pad.
GrayImage render_tile_grid(const std::vector<std::vector<uint8_t>>& tiles, uint32_t rows,
                           uint32_t cols, uint32_t tile_h, uint32_t tile_w, uint32_t pad);

// Map weights in [0, w_max] linearly onto [0, 255], rounding to nearest.
std::vector<uint8_t> weights_to_gray(std::span<const double> w, double w_max);

// Learned input filters of the plastic input projection, one tile per
// excitatory neuron (per patch under weight sharing), written as a PGM grid.
GrayImage filter_grid(const Network& net, uint32_t pad = 1);
void write_filter_grid(const Network& net, const std::filesystem::path& path, uint32_t pad = 1);

}  // namespace csnn
