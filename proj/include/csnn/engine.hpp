#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "csnn/encoding.hpp"
#include "csnn/network.hpp"

namespace csnn {

struct Schedule {
    double dt = 0.5;             // ms
    double present_ms = 350.0;
    double rest_ms = 150.0;
    bool reset_between_examples = false;  // reset state instead of simulating rest

    void validate() const;
    uint32_t present_steps() const { return static_cast<uint32_t>(present_ms / dt + 0.5); }
    uint32_t rest_steps() const { return static_cast<uint32_t>(rest_ms / dt + 0.5); }
};

// Activity summary of one presentation (presentation phase only).
struct SpikeRecord {
    uint64_t ordinal = 0;
    int32_t label = -1;
    uint64_t input_spikes = 0;   // over the final attempt
    uint32_t escalations = 0;    // silent-presentation retries used
    std::vector<uint32_t> exc_counts;
    std::vector<uint32_t> patch_argmax;  // per patch, local index of its most active neuron

    uint64_t total_exc() const;
};

// Work counters. `accounted` follows the analytic per-step budget for
// conductance and trace updates (the lateral inhibition term enters as
// (m-1)^2 for the all-to-others rule); the executed_* counters track work
// actually performed.
struct OpCounters {
    uint64_t steps = 0;
    uint64_t accounted = 0;
    uint64_t executed_conductance_decays = 0;
    uint64_t executed_injections = 0;
    uint64_t executed_trace_updates = 0;
    uint64_t executed_weight_updates = 0;
    uint64_t executed_voltage_updates = 0;
    uint64_t input_spikes = 0;
    uint64_t exc_spikes = 0;
};

struct CostInputs {
    double n = 0;      // input neurons
    double m = 0;      // excitatory (== inhibitory) neurons
    double steps = 0;  // timesteps simulated per example
    double r_x = 0;    // mean input spikes per neuron per step
    double r_e = 0;    // mean excitatory spikes per neuron per step
};

struct CostEstimate {
    double operations = 0;
    double memory_words = 0;
};

// Analytic per-example cost:
//   operations = steps * (3m + 2nm + (m-1)^2 + r_x * m + r_e * n)
//   memory     = 3nm + (m-1)^2 + 3m
CostEstimate estimate_cost(const CostInputs& in);

struct MeasuredRates {
    double r_x = 0;
    double r_e = 0;
};

// Mean spikes per neuron per presentation step over a spike log.
MeasuredRates measure_rates(std::span<const SpikeRecord> log, uint32_t n_input,
                            uint32_t steps_per_example);

// Clock-driven simulator. Within a step: conductance decay, injection of the
// previous step's spikes (one-step propagation latency on every projection),
// presynaptic STDP events, LIF integration, postsynaptic STDP events. Input
// spikes sampled at step t therefore reach excitatory conductances at t+1.
class Simulator {
public:
    Simulator(Network net, Schedule sched, EncoderConfig enc, uint64_t seed);

    // Present one image (intensities in [0, 1]): presentation phase, then
    // rest phase or state reset. When learning is false weights, traces and
    // adaptive thresholds all stay frozen. Presentations with fewer
    // excitatory spikes than the encoder minimum are retried at escalated
    // input rates (non-blank images only).
    SpikeRecord present_example(std::span<const double> image, int32_t label,
                                uint64_t ordinal, bool learning);

    Network& network() { return net_; }
    const Network& network() const { return net_; }
    const Schedule& schedule() const { return sched_; }
    const EncoderConfig& encoder() const { return enc_; }
    uint64_t seed() const { return seed_; }
    int64_t step_index() const { return step_; }
    void set_step_index(int64_t s) { step_ = s; }

    const OpCounters& counters() const { return counters_; }
    void reset_counters() { counters_ = OpCounters{}; }
    void set_counters(const OpCounters& c) { counters_ = c; }

    // previous-step spike masks (exposed for checkpointing)
    std::vector<uint8_t>& input_prev() { return input_prev_; }
    std::vector<uint8_t>& exc_prev() { return exc_prev_; }
    std::vector<uint8_t>& inh_prev() { return inh_prev_; }
    const std::vector<uint8_t>& input_prev() const { return input_prev_; }
    const std::vector<uint8_t>& exc_prev() const { return exc_prev_; }
    const std::vector<uint8_t>& inh_prev() const { return inh_prev_; }

private:
    void advance(const uint8_t* input_mask, bool learning, SpikeRecord* rec);
    void run_rest(bool learning);
    void run_presentation(std::span<const double> image, double rate_hz, bool learning,
                          Rng& rng, SpikeRecord& rec);

    Network net_;
    Schedule sched_;
    EncoderConfig enc_;
    uint64_t seed_ = 0;
    int64_t step_ = 0;
    uint64_t accounted_per_step_ = 0;

    std::vector<uint8_t> input_prev_, exc_prev_, inh_prev_;
    std::vector<uint8_t> exc_now_, inh_now_;
    std::vector<double> incr_exc_, incr_inh_;
    std::vector<uint8_t> train_;  // spike train scratch
    std::vector<uint32_t> event_scratch_;
    OpCounters counters_;
};

struct TrainHooks {
    uint32_t checkpoint_every = 0;  // examples; 0 disables
    uint32_t metrics_every = 250;
    std::function<void(const Simulator&, std::span<const SpikeRecord>, uint64_t next_ordinal)>
        on_checkpoint;
    std::function<void(const Simulator&, std::span<const SpikeRecord>, uint64_t next_ordinal)>
        on_metrics;
};

// Present examples [first, first + count) in order with learning on,
// appending to `log` (one record per example). Checkpoint and metrics hooks
// fire after every cadence-th example. A SimulationFault is annotated with
// the failing example and the last completed checkpoint before rethrow.
void train(Simulator& sim, std::span<const std::vector<double>> images,
           std::span<const int32_t> labels, uint64_t first, uint64_t count,
           std::vector<SpikeRecord>& log, const TrainHooks& hooks = {});

}  // namespace csnn
