#include "csnn/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csnn {

void PlasticityParams::validate() const {
    if (w_max <= 0) throw ConfigError("plasticity: w_max must be positive");
    if (eta_pre < 0 || eta_post < 0) throw ConfigError("plasticity: learning rates must be non-negative");
    if (tau_pre <= 0 || tau_post <= 0) throw ConfigError("plasticity: trace time constants must be positive");
    if (init_scale < 0 || init_scale > 1) throw ConfigError("plasticity: init_scale must lie in [0, 1]");
}

SynapseGroup make_synapse_group(std::string name, uint32_t n_pre, uint32_t n_post,
                                std::vector<std::pair<uint32_t, uint32_t>> edges,
                                Polarity pol, bool plastic, const PlasticityParams& plast,
                                double dt,
                                std::vector<uint32_t> slot_of_edge, uint32_t n_slots) {
    SynapseGroup g;
    g.name = std::move(name);
    g.n_pre = n_pre;
    g.n_post = n_post;
    g.polarity = pol;
    g.plastic = plastic;
    g.plast = plast;
    g.dt = dt;

    const size_t nc = edges.size();
    if (!slot_of_edge.empty() && slot_of_edge.size() != nc)
        throw std::invalid_argument("make_synapse_group: slot list size mismatch");

    std::vector<uint32_t> order(nc);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return edges[a] < edges[b];
    });

    g.pre_offsets.assign(n_pre + 1, 0);
    g.post_of.resize(nc);
    g.weight_slot.resize(nc);
    for (size_t c = 0; c < nc; ++c) {
        const auto& [pre, post] = edges[order[c]];
        if (pre >= n_pre || post >= n_post)
            throw std::invalid_argument("make_synapse_group: edge endpoint out of range");
        if (c > 0 && edges[order[c - 1]] == edges[order[c]])
            throw std::invalid_argument("make_synapse_group: duplicate edge");
        g.pre_offsets[pre + 1]++;
        g.post_of[c] = post;
        g.weight_slot[c] = slot_of_edge.empty() ? static_cast<uint32_t>(c)
                                                : slot_of_edge[order[c]];
    }
    for (uint32_t i = 0; i < n_pre; ++i) g.pre_offsets[i + 1] += g.pre_offsets[i];

    if (slot_of_edge.empty()) {
        g.shared = false;
        g.n_slots = static_cast<uint32_t>(nc);
    } else {
        g.shared = true;
        g.n_slots = n_slots;
        for (uint32_t s : g.weight_slot)
            if (s >= n_slots) throw std::invalid_argument("make_synapse_group: slot out of range");
    }
    g.weights.assign(g.n_slots, 0.0);

    // Incoming view: connection ids grouped by post. Connections are already
    // sorted by (pre, post), so a stable pass keeps pre ascending per post.
    g.post_offsets.assign(n_post + 1, 0);
    for (size_t c = 0; c < nc; ++c) g.post_offsets[g.post_of[c] + 1]++;
    for (uint32_t j = 0; j < n_post; ++j) g.post_offsets[j + 1] += g.post_offsets[j];
    g.incoming.resize(nc);
    std::vector<uint32_t> cursor(g.post_offsets.begin(), g.post_offsets.end() - 1);
    for (size_t c = 0; c < nc; ++c) g.incoming[cursor[g.post_of[c]]++] = static_cast<uint32_t>(c);

    if (g.plastic) {
        g.a_pre.assign(nc, 0.0);
        g.a_post.assign(nc, 0.0);
        g.last_update.assign(nc, 0);
    }
    return g;
}

void initialize_weights(SynapseGroup& g, uint64_t seed) {
    if (!g.plastic) return;
    Rng rng(seed);
    const double hi = g.plast.w_max * g.plast.init_scale;
    for (double& w : g.weights) w = rng.uniform() * hi;
    std::fill(g.a_pre.begin(), g.a_pre.end(), 0.0);
    std::fill(g.a_post.begin(), g.a_post.end(), 0.0);
    std::fill(g.last_update.begin(), g.last_update.end(), 0);
}

void decay_traces_to(SynapseGroup& g, uint32_t connection, int64_t now) {
    int64_t last = g.last_update[connection];
    if (now == last) return;
    if (now < last) throw std::invalid_argument("decay_traces_to: time went backwards");
    const double elapsed = static_cast<double>(now - last) * g.dt;
    g.a_pre[connection] *= std::exp(-elapsed / g.plast.tau_pre);
    g.a_post[connection] *= std::exp(-elapsed / g.plast.tau_post);
    g.last_update[connection] = now;
}

namespace {

double clamp_weight(double w, double w_max) {
    if (w < 0.0) return 0.0;
    if (w > w_max) return w_max;
    return w;
}

// Shared-slot batches: deltas are collected against pre-batch weights, then
// each slot is moved by the mean of its contributions and clamped once.
void apply_shared_deltas(SynapseGroup& g, std::vector<std::pair<uint32_t, double>>& deltas) {
    std::sort(deltas.begin(), deltas.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t i = 0;
    while (i < deltas.size()) {
        const uint32_t slot = deltas[i].first;
        double sum = 0.0;
        size_t count = 0;
        for (; i < deltas.size() && deltas[i].first == slot; ++i, ++count) sum += deltas[i].second;
        g.weights[slot] = clamp_weight(g.weights[slot] + sum / static_cast<double>(count),
                                       g.plast.w_max);
    }
}

}  // namespace

StdpStats apply_pre_spike_batch(SynapseGroup& g, std::span<const uint32_t> pre_indices,
                                int64_t now) {
    if (!g.plastic) throw std::invalid_argument("apply_pre_spike_batch: group is not plastic");
    StdpStats stats;
    std::vector<std::pair<uint32_t, double>> deltas;
    for (uint32_t pre : pre_indices) {
        if (pre >= g.n_pre) throw std::invalid_argument("apply_pre_spike_batch: index out of range");
        for (uint32_t c = g.pre_offsets[pre]; c < g.pre_offsets[pre + 1]; ++c) {
            decay_traces_to(g, c, now);
            const uint32_t slot = g.weight_slot[c];
            const double delta = -g.plast.eta_pre * g.a_post[c] * g.weights[slot];
            if (g.shared)
                deltas.emplace_back(slot, delta);
            else
                g.weights[slot] = clamp_weight(g.weights[slot] + delta, g.plast.w_max);
            g.a_pre[c] = 1.0;
            stats.trace_updates++;
            stats.weight_updates++;
        }
    }
    if (g.shared) apply_shared_deltas(g, deltas);
    return stats;
}

StdpStats apply_post_spike_batch(SynapseGroup& g, std::span<const uint32_t> post_indices,
                                 int64_t now) {
    if (!g.plastic) throw std::invalid_argument("apply_post_spike_batch: group is not plastic");
    StdpStats stats;
    std::vector<std::pair<uint32_t, double>> deltas;
    for (uint32_t post : post_indices) {
        if (post >= g.n_post) throw std::invalid_argument("apply_post_spike_batch: index out of range");
        for (uint32_t k = g.post_offsets[post]; k < g.post_offsets[post + 1]; ++k) {
            const uint32_t c = g.incoming[k];
            decay_traces_to(g, c, now);
            const uint32_t slot = g.weight_slot[c];
            const double delta = g.plast.eta_post * g.a_pre[c] * (g.plast.w_max - g.weights[slot]);
            if (g.shared)
                deltas.emplace_back(slot, delta);
            else
                g.weights[slot] = clamp_weight(g.weights[slot] + delta, g.plast.w_max);
            g.a_post[c] = 1.0;
            stats.trace_updates++;
            stats.weight_updates++;
        }
    }
    if (g.shared) apply_shared_deltas(g, deltas);
    return stats;
}

}  // namespace csnn
