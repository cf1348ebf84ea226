#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace csnn {

// CLI exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_data_error = 3;
inline constexpr int exit_simulation_fault = 4;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when simulation state goes non-finite. Carries the offending neuron
// index and, once the engine catches it, the example ordinal being presented.
struct SimulationFault : std::runtime_error {
    SimulationFault(const std::string& what, size_t neuron, const std::string& population)
        : std::runtime_error(what), neuron_index(neuron), population(population) {}

    size_t neuron_index = 0;
    std::string population;
    int64_t example_ordinal = -1;
    int64_t last_checkpoint_ordinal = -1;
};

}  // namespace csnn
