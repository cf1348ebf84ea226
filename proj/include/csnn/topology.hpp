#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csnn/errors.hpp"
#include "csnn/lif.hpp"

namespace csnn {

// One convolution window: its position on the window grid and the flat input
// indices it covers, row-major within the window.
struct VisualField {
    uint32_t row = 0;
    uint32_t col = 0;
    std::vector<uint32_t> pixels;
};

// Windows of size kernel x kernel at the given stride over an input_h x
// input_w image, row-major over the window grid. The geometry must tile
// exactly; otherwise a ConfigError names the offending numbers.
std::vector<VisualField> conv_windows(uint32_t input_h, uint32_t input_w,
                                      uint32_t kernel, uint32_t stride);

enum class LatticeScope { all_pairs, ring };

struct ConvTopology {
    uint32_t input_h = 28;
    uint32_t input_w = 28;
    uint32_t kernel = 16;
    uint32_t stride = 2;
    uint32_t n_patches = 1;
    bool shared_weights = false;
    uint32_t lattice_m = 0;  // 0 = none, else 4 or 8 grid neighbors
    LatticeScope lattice_scope = LatticeScope::all_pairs;

    void validate() const;
    uint32_t grid_rows() const { return (input_h - kernel) / stride + 1; }
    uint32_t grid_cols() const { return (input_w - kernel) / stride + 1; }
    uint32_t n_locations() const { return grid_rows() * grid_cols(); }
    uint32_t n_exc() const { return n_locations() * n_patches; }
    // independent plastic feedforward weights
    uint64_t n_parameters() const {
        uint64_t per_patch = static_cast<uint64_t>(kernel) * kernel;
        if (!shared_weights) per_patch *= n_locations();
        return per_patch * n_patches;
    }
};

// Grid neighbors of (row, col) on a rows x cols grid: m = 4 gives the von
// Neumann neighborhood, m = 8 adds diagonals; both truncate at borders.
// Returned in row-major order.
std::vector<std::pair<uint32_t, uint32_t>> lattice_neighbors(uint32_t row, uint32_t col,
                                                             uint32_t rows, uint32_t cols,
                                                             uint32_t m);

enum class ProjectionRule {
    dense,                         // every pre to every post
    conv,                          // window pixels to the location's neuron, per patch
    one_to_one,                    // exc i to inh i
    all_but_source,                // inh i to every exc j != i
    same_location_other_patches,   // inh (patch, loc) to exc (other patch, same loc)
    lattice,                       // exc (patch, loc) to exc (other patch, neighbor loc)
};

struct ProjectionSpec {
    std::string name;
    std::string source;   // "input", "exc" or "inh"
    std::string target;
    ProjectionRule rule = ProjectionRule::dense;
    Polarity polarity = Polarity::excitatory;
    bool plastic = false;
    double strength = 0.0;  // fixed groups only
};

// Declarative network description; the network module instantiates it.
struct NetworkSpec {
    enum class Kind { baseline, csnn };
    Kind kind = Kind::baseline;
    uint32_t n_input = 784;
    uint32_t n_neurons = 100;  // baseline excitatory count
    ConvTopology conv;         // used when kind == csnn
    std::vector<ProjectionSpec> projections;

    uint32_t n_exc() const { return kind == Kind::baseline ? n_neurons : conv.n_exc(); }
    uint32_t n_inh() const { return n_exc(); }
    uint32_t n_patches() const { return kind == Kind::baseline ? 1 : conv.n_patches; }
    uint32_t neurons_per_patch() const {
        return kind == Kind::baseline ? n_neurons : conv.n_locations();
    }
    void validate() const;
};

NetworkSpec build_baseline(uint32_t n_input, uint32_t n_neurons,
                           double exc_inh_strength, double inh_exc_strength);

NetworkSpec build_csnn(const ConvTopology& conv,
                       double exc_inh_strength, double inh_exc_strength);

}  // namespace csnn
