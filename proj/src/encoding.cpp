#include "csnn/encoding.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace csnn {

void EncoderConfig::validate() const {
    if (rate_scale_hz <= 0) throw ConfigError("encoder: rate_scale_hz must be positive");
    if (escalation_hz <= 0) throw ConfigError("encoder: escalation_hz must be positive");
}

double spike_probability(double intensity, double rate_scale_hz, double dt) {
    return std::min(1.0, rate_scale_hz * intensity * dt * 1e-3);
}

void poisson_spikes(std::span<const double> image, double rate_scale_hz, double dt,
                    uint32_t steps, Rng& rng, std::vector<uint8_t>& out) {
    const size_t n = image.size();
    std::vector<double> p(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(image[i] >= 0.0 && image[i] <= 1.0))
            throw std::invalid_argument("poisson_spikes: intensity out of [0, 1] at pixel " +
                                        std::to_string(i));
        p[i] = spike_probability(image[i], rate_scale_hz, dt);
    }
    out.assign(static_cast<size_t>(steps) * n, 0);
    for (uint32_t t = 0; t < steps; ++t) {
        uint8_t* row = out.data() + static_cast<size_t>(t) * n;
        for (size_t i = 0; i < n; ++i) {
            if (p[i] <= 0.0) continue;
            if (rng.uniform() < p[i]) row[i] = 1;
        }
    }
}

std::vector<uint8_t> poisson_spikes(std::span<const double> image, double rate_scale_hz,
                                    double dt, uint32_t steps, Rng& rng) {
    std::vector<uint8_t> out;
    poisson_spikes(image, rate_scale_hz, dt, steps, rng, out);
    return out;
}

}  // namespace csnn
