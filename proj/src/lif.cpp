#include "csnn/lif.hpp"

#include <cmath>
#include <stdexcept>

namespace csnn {

void LifParams::validate() const {
    if (!(v_reset <= v_rest && v_rest < v_threshold))
        throw ConfigError("lif: need v_reset <= v_rest < v_threshold");
    if (!(e_inh < v_rest))
        throw ConfigError("lif: need e_inh < v_rest");
    if (!(v_rest < e_exc))
        throw ConfigError("lif: need v_rest < e_exc");
    if (tau_membrane <= 0 || tau_ge <= 0 || tau_gi <= 0 || tau_theta <= 0)
        throw ConfigError("lif: time constants must be positive");
    if (refractory_ms < 0)
        throw ConfigError("lif: refractory_ms must be non-negative");
    if (theta_plus < 0)
        throw ConfigError("lif: theta_plus must be non-negative");
}

LifState LifState::resting(size_t n, const LifParams& p) {
    LifState s;
    s.v.assign(n, p.v_rest);
    s.g_e.assign(n, 0.0);
    s.g_i.assign(n, 0.0);
    s.theta.assign(n, 0.0);
    s.refractory_left.assign(n, 0.0);
    s.last_spike_step.assign(n, -1);
    return s;
}

void LifState::reset(const LifParams& p) {
    size_t n = v.size();
    v.assign(n, p.v_rest);
    g_e.assign(n, 0.0);
    g_i.assign(n, 0.0);
    refractory_left.assign(n, 0.0);
    last_spike_step.assign(n, -1);
}

void decay_conductances(LifState& s, const LifParams& p, double dt) {
    const double fe = std::exp(-dt / p.tau_ge);
    const double fi = std::exp(-dt / p.tau_gi);
    for (double& g : s.g_e) g *= fe;
    for (double& g : s.g_i) g *= fi;
}

void inject_spikes(LifState& s, std::span<const double> increments, Polarity pol) {
    if (increments.size() != s.size())
        throw std::invalid_argument("inject_spikes: increment size mismatch");
    std::vector<double>& g = (pol == Polarity::excitatory) ? s.g_e : s.g_i;
    for (size_t i = 0; i < increments.size(); ++i) {
        if (increments[i] < 0)
            throw std::invalid_argument("inject_spikes: negative conductance increment");
        g[i] += increments[i];
    }
}

void step_lif(LifState& s, const LifParams& p, double dt, int64_t step_index,
              std::vector<uint8_t>& spikes_out, bool adapt) {
    const size_t n = s.size();
    spikes_out.assign(n, 0);
    const double theta_decay = std::exp(-dt / p.tau_theta);
    const double euler = dt / p.tau_membrane;
    for (size_t i = 0; i < n; ++i) {
        if (adapt) s.theta[i] *= theta_decay;
        if (s.refractory_left[i] > 0.0) {
            // Refractory neurons hold the reset potential and cannot fire.
            s.v[i] = p.v_reset;
            s.refractory_left[i] -= dt;
            if (s.refractory_left[i] < 0.0) s.refractory_left[i] = 0.0;
            continue;
        }
        double v = s.v[i];
        v += euler * ((p.v_rest - v) + s.g_e[i] * (p.e_exc - v) + s.g_i[i] * (p.e_inh - v));
        if (!std::isfinite(v))
            throw SimulationFault("lif: non-finite membrane potential", i, "");
        s.v[i] = v;
        if (v > p.v_threshold + s.theta[i]) {
            spikes_out[i] = 1;
            s.v[i] = p.v_reset;
            if (adapt) s.theta[i] += p.theta_plus;
            s.refractory_left[i] = p.refractory_ms;
            s.last_spike_step[i] = step_index;
        }
    }
}

}  // namespace csnn
