#pragma once

#include <cstdint>
#include <vector>

#include "csnn/lif.hpp"
#include "csnn/plasticity.hpp"
#include "csnn/topology.hpp"

namespace csnn {

// Population ids used to wire projections.
enum class Pop : int { input = 0, exc = 1, inh = 2 };

// A fully materialized network: LIF populations at rest plus one
// SynapseGroup per projection. Excitatory neurons are indexed
// patch-major: neuron(patch, location) = patch * locations + location;
// inhibitory neurons mirror that indexing one to one.
struct Network {
    NetworkSpec spec;
    LifParams exc_params;
    LifParams inh_params;
    double dt = 0.5;

    LifState exc;
    LifState inh;

    std::vector<SynapseGroup> projections;
    std::vector<Pop> source_of;
    std::vector<Pop> target_of;

    uint32_t n_input() const { return spec.n_input; }
    uint32_t n_exc() const { return spec.n_exc(); }
    uint32_t n_inh() const { return spec.n_inh(); }

    // index of the plastic input projection
    size_t input_projection() const;

    const SynapseGroup& projection(const std::string& name) const;
};

// Materialize a NetworkSpec. Plastic weights are drawn from per-projection
// streams derived from `seed`; fixed weights take the projection strength.
Network instantiate_network(const NetworkSpec& spec, const LifParams& exc_params,
                            const LifParams& inh_params, const PlasticityParams& plast,
                            double dt, uint64_t seed);

// Incoming weights of one postsynaptic neuron, presynaptic index ascending.
// For conv projections this is kernel row-major order.
std::vector<double> incoming_weights(const SynapseGroup& g, uint32_t post);

}  // namespace csnn
