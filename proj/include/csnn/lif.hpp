#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csnn/errors.hpp"

namespace csnn {

enum class Polarity { excitatory, inhibitory };

// Conductance-based leaky integrate-and-fire parameters. Voltages in mV,
// times in ms, conductances dimensionless relative to the leak conductance.
struct LifParams {
    double tau_membrane = 100.0;
    double v_rest = -65.0;
    double v_reset = -65.0;
    double v_threshold = -52.0;     // base threshold; effective value is v_threshold + theta
    double e_exc = 0.0;             // excitatory reversal potential
    double e_inh = -100.0;          // inhibitory reversal potential
    double tau_ge = 1.0;            // excitatory conductance decay
    double tau_gi = 2.0;            // inhibitory conductance decay
    double refractory_ms = 5.0;
    double theta_plus = 0.05;       // adaptive threshold bump per spike
    double tau_theta = 1e7;         // adaptive threshold decay

    void validate() const;

    static LifParams excitatory_defaults() { return LifParams{}; }

    // Faster, non-adapting population driving lateral inhibition.
    static LifParams inhibitory_defaults() {
        LifParams p;
        p.tau_membrane = 10.0;
        p.v_rest = -60.0;
        p.v_reset = -60.0;
        p.v_threshold = -40.0;
        p.refractory_ms = 2.0;
        p.theta_plus = 0.0;
        return p;
    }
};

// Per-population state, structure-of-arrays.
struct LifState {
    std::vector<double> v;
    std::vector<double> g_e;
    std::vector<double> g_i;
    std::vector<double> theta;
    std::vector<double> refractory_left;   // ms remaining; > 0 means refractory
    std::vector<int64_t> last_spike_step;  // -1 until first spike

    size_t size() const { return v.size(); }

    static LifState resting(size_t n, const LifParams& p);
    void reset(const LifParams& p);  // back to rest; theta is kept
};

// Exponential decay of g_e and g_i over one step of dt ms.
void decay_conductances(LifState& s, const LifParams& p, double dt);

// Add per-neuron conductance increments (summed afferent weights) to g_e or
// g_i. Increments must be non-negative; weights carry no sign, polarity does.
void inject_spikes(LifState& s, std::span<const double> increments, Polarity pol);

// Advance membrane state by one forward-Euler step of dt ms and emit spikes.
// Order within the step: theta decay, refractory hold/countdown, Euler
// integration, strict > threshold test, spike side effects (v to v_reset,
// theta += theta_plus, refractory starts). spikes_out is resized to the
// population and set to 0/1. Throws SimulationFault if any membrane value
// turns non-finite. With adapt false the adaptive threshold is frozen:
// no decay, no bump on spikes (evaluation mode).
void step_lif(LifState& s, const LifParams& p, double dt, int64_t step_index,
              std::vector<uint8_t>& spikes_out, bool adapt = true);

}  // namespace csnn
