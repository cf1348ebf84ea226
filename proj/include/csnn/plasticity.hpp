#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csnn/errors.hpp"
#include "csnn/lif.hpp"
#include "csnn/rng.hpp"

namespace csnn {

struct PlasticityParams {
    double eta_pre = 1e-4;     // depression rate on pre spikes
    double eta_post = 1e-2;    // potentiation rate on post spikes
    double w_max = 1.0;
    double tau_pre = 20.0;     // presynaptic trace decay, ms
    double tau_post = 20.0;    // postsynaptic trace decay, ms
    double init_scale = 0.3;   // initial weights uniform on [0, w_max * init_scale]

    void validate() const;
};

// One synaptic projection between two populations. Connections are stored
// sorted by (pre, post) with CSR-style offsets by presynaptic neuron plus an
// incoming view grouped by postsynaptic neuron. Weights live in "slots":
// normally slot == connection index; under weight sharing several
// connections map to one slot, which keeps tied weights equal by
// construction.
struct SynapseGroup {
    std::string name;
    uint32_t n_pre = 0;
    uint32_t n_post = 0;
    Polarity polarity = Polarity::excitatory;
    bool plastic = false;
    double dt = 0.5;  // ms per step, for trace decay

    std::vector<uint32_t> pre_offsets;    // n_pre + 1
    std::vector<uint32_t> post_of;        // per connection
    std::vector<uint32_t> weight_slot;    // per connection
    std::vector<uint32_t> post_offsets;   // n_post + 1
    std::vector<uint32_t> incoming;       // connection ids grouped by post, pre ascending

    uint32_t n_slots = 0;                 // == connections unless shared
    bool shared = false;
    std::vector<double> weights;          // per slot

    PlasticityParams plast;

    // Per-connection pair traces, decayed lazily: last_update holds the step
    // at which a_pre/a_post were last brought current.
    std::vector<double> a_pre;
    std::vector<double> a_post;
    std::vector<int64_t> last_update;

    size_t connection_count() const { return post_of.size(); }
    double weight_of(uint32_t connection) const { return weights[weight_slot[connection]]; }
};

// Build from an explicit edge list. edges are (pre, post) pairs; they are
// sorted internally by (pre, post). slot_of_edge, when non-empty, assigns a
// weight slot to each edge (same order as `edges`) for shared weights;
// otherwise each connection gets its own slot.
SynapseGroup make_synapse_group(std::string name, uint32_t n_pre, uint32_t n_post,
                                std::vector<std::pair<uint32_t, uint32_t>> edges,
                                Polarity pol, bool plastic, const PlasticityParams& plast,
                                double dt,
                                std::vector<uint32_t> slot_of_edge = {},
                                uint32_t n_slots = 0);

// Fill plastic weights i.i.d. uniform on [0, w_max * init_scale] (slot order)
// and clear traces. Fixed groups are left untouched.
void initialize_weights(SynapseGroup& g, uint64_t seed);

// Bring one connection's traces current at step `now`.
void decay_traces_to(SynapseGroup& g, uint32_t connection, int64_t now);

struct StdpStats {
    uint64_t trace_updates = 0;
    uint64_t weight_updates = 0;
};

// STDP event handlers. On a presynaptic spike every outgoing connection is
// depressed by eta_pre * a_post * w and its a_pre is set to 1; on a
// postsynaptic spike every incoming connection is potentiated by
// eta_post * a_pre * (w_max - w) and its a_post is set to 1. Weights are
// clamped to [0, w_max] after every update. Under weight sharing the deltas
// of one batch are computed against the pre-batch weights and each slot
// moves by the arithmetic mean of its contributions. Returns the number of
// connections whose traces and weights were touched.
StdpStats apply_pre_spike_batch(SynapseGroup& g, std::span<const uint32_t> pre_indices,
                                int64_t now);
StdpStats apply_post_spike_batch(SynapseGroup& g, std::span<const uint32_t> post_indices,
                                 int64_t now);

inline StdpStats on_pre_spike(SynapseGroup& g, uint32_t pre, int64_t now) {
    return apply_pre_spike_batch(g, std::span<const uint32_t>(&pre, 1), now);
}
inline StdpStats on_post_spike(SynapseGroup& g, uint32_t post, int64_t now) {
    return apply_post_spike_batch(g, std::span<const uint32_t>(&post, 1), now);
}

}  // namespace csnn
