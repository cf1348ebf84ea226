#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csnn/engine.hpp"
#include "csnn/errors.hpp"

namespace csnn {

inline constexpr uint32_t n_classes = 10;

// Per-neuron class labels fitted from a spike log: each neuron takes the
// class on which its mean spike count is highest (ties to the lower class).
struct LabelAssignment {
    std::vector<int32_t> labels;      // per neuron
    std::vector<double> mean_rates;   // neuron-major, n x n_classes
    std::vector<uint8_t> dead;        // 1 when the neuron never spiked in the log

    size_t size() const { return labels.size(); }
    uint32_t dead_count() const;
};

// Throws DataError naming the first class absent from the log.
LabelAssignment assign_labels(std::span<const SpikeRecord> log);

// Voting schemes. All take one test presentation's per-neuron spike counts
// and predict a digit class.

// Mean count over the neurons labeled with each class (0 when a class has no
// neurons); argmax with ties to the lower class.
int32_t vote_all(std::span<const uint32_t> counts, const LabelAssignment& labels);

// Label of the single most active neuron (ties to the lower index).
int32_t vote_most_spiked(std::span<const uint32_t> counts, const LabelAssignment& labels);

// vote_all restricted to the ceil(percent/100 * n) most active neurons, ties
// at the cutoff resolved toward lower indices. percent in (0, 100].
int32_t vote_top_percent(std::span<const uint32_t> counts, const LabelAssignment& labels,
                         double percent = 10.0);

// Stored per-patch argmax vectors from the training phase, one per example.
struct VoteVectorStore {
    uint32_t n_patches = 0;
    std::vector<uint32_t> vectors;  // example-major, size() x n_patches
    std::vector<int32_t> labels;

    size_t size() const { return labels.size(); }
    void add(std::span<const uint32_t> vec, int32_t label);
    std::span<const uint32_t> vector_of(size_t i) const;
};

VoteVectorStore build_vote_store(std::span<const SpikeRecord> log);

// 1-nearest-neighbor under Hamming distance over the stored vectors; ties to
// the earliest stored example.
int32_t vote_correlation(std::span<const uint32_t> test_vector, const VoteVectorStore& store);

// Estimated training accuracy: labels fitted on window i predict window
// i + 1 under vote_all. Points are (examples seen, accuracy); needs at least
// two full windows.
std::vector<std::pair<uint64_t, double>> accuracy_curve(std::span<const SpikeRecord> log,
                                                        uint32_t window = 250);

}  // namespace csnn
