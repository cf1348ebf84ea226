#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "csnn/encoding.hpp"
#include "csnn/engine.hpp"
#include "csnn/plasticity.hpp"
#include "csnn/topology.hpp"

namespace csnn {

enum class VotingScheme { all, most_spiked, top_percent, correlation };

std::string to_string(VotingScheme v);
VotingScheme voting_from_string(const std::string& s);

struct DataPaths {
    std::string train_images = "data/mnist/train-images-idx3-ubyte";
    std::string train_labels = "data/mnist/train-labels-idx1-ubyte";
    std::string test_images = "data/mnist/test-images-idx3-ubyte";
    std::string test_labels = "data/mnist/test-labels-idx1-ubyte";
};

struct RunSettings {
    uint64_t limit_train = 0;  // 0 = whole split
    uint64_t limit_test = 0;
    uint32_t checkpoint_every = 250;
    uint32_t metrics_every = 250;
    uint32_t label_window = 1000;  // trailing training examples used to fit labels
    std::vector<VotingScheme> voting = {VotingScheme::all};
    double top_percent = 10.0;
    std::string out_dir = "out";
};

struct ArchitectureConfig {
    NetworkSpec::Kind kind = NetworkSpec::Kind::baseline;
    uint32_t n_neurons = 100;
    ConvTopology conv;
    double exc_inh_strength = 22.5;
    double inh_exc_strength = 17.0;
};

// Whole run description. Parsed strictly: unknown keys anywhere are
// rejected, every value is validated, and the canonical JSON form (defaults
// filled in) feeds the config hash embedded in checkpoints.
struct RunConfig {
    uint64_t seed = 1;
    ArchitectureConfig architecture;
    LifParams exc = LifParams::excitatory_defaults();
    LifParams inh = LifParams::inhibitory_defaults();
    PlasticityParams plasticity;
    EncoderConfig encoder;
    Schedule schedule;
    DataPaths data;
    RunSettings run;

    void validate() const;
    NetworkSpec network_spec() const;

    nlohmann::json to_json() const;
    std::string canonical_text() const { return to_json().dump(); }
    uint64_t config_hash() const;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
};

}  // namespace csnn
