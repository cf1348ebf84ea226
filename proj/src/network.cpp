#include "csnn/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace csnn {

size_t Network::input_projection() const {
    for (size_t i = 0; i < projections.size(); ++i)
        if (projections[i].plastic && source_of[i] == Pop::input) return i;
    throw std::logic_error("network: no plastic input projection");
}

const SynapseGroup& Network::projection(const std::string& name) const {
    for (const auto& g : projections)
        if (g.name == name) return g;
    throw std::invalid_argument("network: no projection named " + name);
}

namespace {

using Edge = std::pair<uint32_t, uint32_t>;

Pop pop_of(const std::string& name) {
    if (name == "input") return Pop::input;
    if (name == "exc") return Pop::exc;
    return Pop::inh;
}

// patch-major neuron index
uint32_t unit(uint32_t patch, uint32_t location, uint32_t locations) {
    return patch * locations + location;
}

}  // namespace

Network instantiate_network(const NetworkSpec& spec, const LifParams& exc_params,
                            const LifParams& inh_params, const PlasticityParams& plast,
                            double dt, uint64_t seed) {
    spec.validate();
    exc_params.validate();
    inh_params.validate();
    plast.validate();
    if (dt <= 0) throw ConfigError("network: dt must be positive");

    Network net;
    net.spec = spec;
    net.exc_params = exc_params;
    net.inh_params = inh_params;
    net.dt = dt;
    net.exc = LifState::resting(spec.n_exc(), exc_params);
    net.inh = LifState::resting(spec.n_inh(), inh_params);

    const bool is_conv = spec.kind == NetworkSpec::Kind::csnn;
    const uint32_t locations = spec.neurons_per_patch();
    const uint32_t patches = spec.n_patches();
    std::vector<VisualField> fields;
    if (is_conv)
        fields = conv_windows(spec.conv.input_h, spec.conv.input_w, spec.conv.kernel,
                              spec.conv.stride);

    for (size_t pi = 0; pi < spec.projections.size(); ++pi) {
        const ProjectionSpec& ps = spec.projections[pi];
        const Pop src = pop_of(ps.source);
        const Pop dst = pop_of(ps.target);
        const uint32_t n_pre = src == Pop::input ? spec.n_input
                             : src == Pop::exc   ? spec.n_exc()
                                                 : spec.n_inh();
        const uint32_t n_post = dst == Pop::exc ? spec.n_exc() : spec.n_inh();

        std::vector<Edge> edges;
        std::vector<uint32_t> slots;
        uint32_t n_slots = 0;

        switch (ps.rule) {
            case ProjectionRule::dense:
                edges.reserve(static_cast<size_t>(n_pre) * n_post);
                for (uint32_t i = 0; i < n_pre; ++i)
                    for (uint32_t j = 0; j < n_post; ++j) edges.emplace_back(i, j);
                break;
            case ProjectionRule::conv: {
                const uint32_t k2 = spec.conv.kernel * spec.conv.kernel;
                const bool share = spec.conv.shared_weights;
                edges.reserve(static_cast<size_t>(k2) * locations * patches);
                for (uint32_t p = 0; p < patches; ++p) {
                    for (uint32_t l = 0; l < locations; ++l) {
                        const uint32_t post = unit(p, l, locations);
                        const auto& px = fields[l].pixels;
                        for (uint32_t kp = 0; kp < k2; ++kp) {
                            edges.emplace_back(px[kp], post);
                            if (share) slots.push_back(p * k2 + kp);
                        }
                    }
                }
                if (share) n_slots = patches * k2;
                break;
            }
            case ProjectionRule::one_to_one:
                for (uint32_t i = 0; i < n_pre; ++i) edges.emplace_back(i, i);
                break;
            case ProjectionRule::all_but_source:
                edges.reserve(static_cast<size_t>(n_pre) * (n_post - 1));
                for (uint32_t i = 0; i < n_pre; ++i)
                    for (uint32_t j = 0; j < n_post; ++j)
                        if (j != i) edges.emplace_back(i, j);
                break;
            case ProjectionRule::same_location_other_patches:
                for (uint32_t p = 0; p < patches; ++p)
                    for (uint32_t l = 0; l < locations; ++l)
                        for (uint32_t q = 0; q < patches; ++q)
                            if (q != p)
                                edges.emplace_back(unit(p, l, locations), unit(q, l, locations));
                break;
            case ProjectionRule::lattice: {
                const uint32_t rows = spec.conv.grid_rows();
                const uint32_t cols = spec.conv.grid_cols();
                for (uint32_t p = 0; p < patches; ++p) {
                    for (uint32_t l = 0; l < locations; ++l) {
                        const auto nb = lattice_neighbors(l / cols, l % cols, rows, cols,
                                                          spec.conv.lattice_m);
                        for (const auto& [nr, nc] : nb) {
                            const uint32_t nl = nr * cols + nc;
                            if (spec.conv.lattice_scope == LatticeScope::all_pairs) {
                                for (uint32_t q = 0; q < patches; ++q)
                                    if (q != p)
                                        edges.emplace_back(unit(p, l, locations),
                                                           unit(q, nl, locations));
                            } else {
                                const uint32_t prev = (p + patches - 1) % patches;
                                const uint32_t next = (p + 1) % patches;
                                if (prev != p)
                                    edges.emplace_back(unit(p, l, locations),
                                                       unit(prev, nl, locations));
                                if (next != p && next != prev)
                                    edges.emplace_back(unit(p, l, locations),
                                                       unit(next, nl, locations));
                            }
                        }
                    }
                }
                break;
            }
        }

        SynapseGroup g = make_synapse_group(ps.name, n_pre, n_post, std::move(edges),
                                            ps.polarity, ps.plastic, plast, dt,
                                            std::move(slots), n_slots);
        if (ps.plastic)
            initialize_weights(g, derive_seed(seed, 0x5331, pi));
        else
            std::fill(g.weights.begin(), g.weights.end(), ps.strength);
        net.projections.push_back(std::move(g));
        net.source_of.push_back(src);
        net.target_of.push_back(dst);
    }
    return net;
}

std::vector<double> incoming_weights(const SynapseGroup& g, uint32_t post) {
    if (post >= g.n_post) throw std::invalid_argument("incoming_weights: index out of range");
    std::vector<double> w;
    w.reserve(g.post_offsets[post + 1] - g.post_offsets[post]);
    for (uint32_t k = g.post_offsets[post]; k < g.post_offsets[post + 1]; ++k)
        w.push_back(g.weights[g.weight_slot[g.incoming[k]]]);
    return w;
}

}  // namespace csnn
