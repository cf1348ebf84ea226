#include "csnn/topology.hpp"

#include <string>

namespace csnn {

std::vector<VisualField> conv_windows(uint32_t input_h, uint32_t input_w,
                                      uint32_t kernel, uint32_t stride) {
    if (kernel == 0 || stride == 0)
        throw ConfigError("conv: kernel and stride must be positive");
    if (kernel > input_h || kernel > input_w)
        throw ConfigError("conv: kernel " + std::to_string(kernel) + " exceeds input " +
                          std::to_string(input_h) + "x" + std::to_string(input_w));
    if ((input_h - kernel) % stride != 0 || (input_w - kernel) % stride != 0)
        throw ConfigError("conv: input " + std::to_string(input_h) + "x" +
                          std::to_string(input_w) + " with kernel " + std::to_string(kernel) +
                          " does not tile at stride " + std::to_string(stride));
    const uint32_t rows = (input_h - kernel) / stride + 1;
    const uint32_t cols = (input_w - kernel) / stride + 1;
    std::vector<VisualField> fields;
    fields.reserve(static_cast<size_t>(rows) * cols);
    for (uint32_t r = 0; r < rows; ++r) {
        for (uint32_t c = 0; c < cols; ++c) {
            VisualField f;
            f.row = r;
            f.col = c;
            f.pixels.reserve(static_cast<size_t>(kernel) * kernel);
            for (uint32_t kr = 0; kr < kernel; ++kr)
                for (uint32_t kc = 0; kc < kernel; ++kc)
                    f.pixels.push_back((r * stride + kr) * input_w + (c * stride + kc));
            fields.push_back(std::move(f));
        }
    }
    return fields;
}

void ConvTopology::validate() const {
    conv_windows(input_h, input_w, kernel, stride);  // geometry checks
    if (n_patches == 0) throw ConfigError("conv: n_patches must be positive");
    if (lattice_m != 0 && lattice_m != 4 && lattice_m != 8)
        throw ConfigError("conv: lattice_m must be 0, 4 or 8");
}

std::vector<std::pair<uint32_t, uint32_t>> lattice_neighbors(uint32_t row, uint32_t col,
                                                             uint32_t rows, uint32_t cols,
                                                             uint32_t m) {
    if (m != 4 && m != 8) throw std::invalid_argument("lattice_neighbors: m must be 4 or 8");
    if (row >= rows || col >= cols)
        throw std::invalid_argument("lattice_neighbors: position off the grid");
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (m == 4 && dr != 0 && dc != 0) continue;
            const int64_t r = static_cast<int64_t>(row) + dr;
            const int64_t c = static_cast<int64_t>(col) + dc;
            if (r < 0 || c < 0 || r >= static_cast<int64_t>(rows) || c >= static_cast<int64_t>(cols))
                continue;
            out.emplace_back(static_cast<uint32_t>(r), static_cast<uint32_t>(c));
        }
    }
    return out;
}

void NetworkSpec::validate() const {
    if (n_input == 0) throw ConfigError("network: n_input must be positive");
    if (kind == Kind::baseline) {
        if (n_neurons == 0) throw ConfigError("network: n_neurons must be positive");
    } else {
        conv.validate();
        if (static_cast<uint64_t>(conv.input_h) * conv.input_w != n_input)
            throw ConfigError("network: input image shape does not match n_input");
    }
    for (const auto& p : projections) {
        if (p.source != "input" && p.source != "exc" && p.source != "inh")
            throw ConfigError("network: unknown projection source " + p.source);
        if (p.target != "exc" && p.target != "inh")
            throw ConfigError("network: unknown projection target " + p.target);
        if (!p.plastic && p.strength < 0)
            throw ConfigError("network: fixed projection strength must be non-negative");
    }
}

NetworkSpec build_baseline(uint32_t n_input, uint32_t n_neurons,
                           double exc_inh_strength, double inh_exc_strength) {
    NetworkSpec spec;
    spec.kind = NetworkSpec::Kind::baseline;
    spec.n_input = n_input;
    spec.n_neurons = n_neurons;
    spec.projections = {
        {"input_exc", "input", "exc", ProjectionRule::dense, Polarity::excitatory, true, 0.0},
        {"exc_inh", "exc", "inh", ProjectionRule::one_to_one, Polarity::excitatory, false,
         exc_inh_strength},
        {"inh_exc", "inh", "exc", ProjectionRule::all_but_source, Polarity::inhibitory, false,
         inh_exc_strength},
    };
    spec.validate();
    return spec;
}

NetworkSpec build_csnn(const ConvTopology& conv,
                       double exc_inh_strength, double inh_exc_strength) {
    NetworkSpec spec;
    spec.kind = NetworkSpec::Kind::csnn;
    spec.n_input = conv.input_h * conv.input_w;
    spec.conv = conv;
    spec.projections = {
        {"input_exc", "input", "exc", ProjectionRule::conv, Polarity::excitatory, true, 0.0},
        {"exc_inh", "exc", "inh", ProjectionRule::one_to_one, Polarity::excitatory, false,
         exc_inh_strength},
        {"inh_exc", "inh", "exc", ProjectionRule::same_location_other_patches,
         Polarity::inhibitory, false, inh_exc_strength},
    };
    if (conv.lattice_m != 0)
        spec.projections.push_back({"exc_exc_lattice", "exc", "exc", ProjectionRule::lattice,
                                    Polarity::excitatory, true, 0.0});
    spec.validate();
    return spec;
}

}  // namespace csnn
