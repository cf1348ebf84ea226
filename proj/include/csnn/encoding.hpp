#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csnn/errors.hpp"
#include "csnn/rng.hpp"

namespace csnn {

struct EncoderConfig {
    double rate_scale_hz = 63.75;     // firing rate at intensity 1.0
    double escalation_hz = 32.0;      // added per silent retry
    uint32_t min_exc_spikes = 5;      // presentation counts below this trigger escalation
    uint32_t max_escalations = 50;
    bool escalation_enabled = true;

    void validate() const;
};

// Per-step Bernoulli spike probability for one pixel at the given rate scale,
// capped at 1. dt in ms, intensities in [0, 1].
double spike_probability(double intensity, double rate_scale_hz, double dt);

// Sample a rate-coded spike train for one image: steps x image.size() masks,
// row-major by step, one independent Bernoulli draw per (step, pixel) with
// nonzero intensity. Throws std::invalid_argument naming the first pixel
// whose intensity falls outside [0, 1].
void poisson_spikes(std::span<const double> image, double rate_scale_hz, double dt,
                    uint32_t steps, Rng& rng, std::vector<uint8_t>& out);

std::vector<uint8_t> poisson_spikes(std::span<const double> image, double rate_scale_hz,
                                    double dt, uint32_t steps, Rng& rng);

}  // namespace csnn
