#include "csnn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace csnn {

uint32_t LabelAssignment::dead_count() const {
    return static_cast<uint32_t>(std::count(dead.begin(), dead.end(), uint8_t{1}));
}

LabelAssignment assign_labels(std::span<const SpikeRecord> log) {
    if (log.empty()) throw DataError("assign_labels: empty spike log");
    const size_t n = log.front().exc_counts.size();
    std::vector<uint64_t> class_examples(n_classes, 0);
    std::vector<double> totals(n * n_classes, 0.0);
    for (const auto& rec : log) {
        if (rec.label < 0 || rec.label >= static_cast<int32_t>(n_classes))
            throw DataError("assign_labels: label out of range: " + std::to_string(rec.label));
        if (rec.exc_counts.size() != n)
            throw DataError("assign_labels: inconsistent neuron counts in log");
        class_examples[rec.label]++;
        for (size_t i = 0; i < n; ++i) totals[i * n_classes + rec.label] += rec.exc_counts[i];
    }
    for (uint32_t c = 0; c < n_classes; ++c)
        if (class_examples[c] == 0)
            throw DataError("assign_labels: class " + std::to_string(c) + " absent from log");

    LabelAssignment out;
    out.labels.resize(n);
    out.mean_rates.resize(n * n_classes);
    out.dead.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
        double all = 0.0;
        uint32_t best = 0;
        for (uint32_t c = 0; c < n_classes; ++c) {
            const double mean = totals[i * n_classes + c] / class_examples[c];
            out.mean_rates[i * n_classes + c] = mean;
            all += totals[i * n_classes + c];
            if (mean > out.mean_rates[i * n_classes + best]) best = c;
        }
        out.labels[i] = static_cast<int32_t>(best);
        if (all == 0.0) out.dead[i] = 1;
    }
    return out;
}

namespace {

int32_t argmax_class_means(const double* sums, const uint32_t* counts) {
    uint32_t best = 0;
    double best_mean = counts[0] ? sums[0] / counts[0] : 0.0;
    for (uint32_t c = 1; c < n_classes; ++c) {
        const double mean = counts[c] ? sums[c] / counts[c] : 0.0;
        if (mean > best_mean) {
            best = c;
            best_mean = mean;
        }
    }
    return static_cast<int32_t>(best);
}

}  // namespace

int32_t vote_all(std::span<const uint32_t> counts, const LabelAssignment& labels) {
    if (counts.size() != labels.size())
        throw std::invalid_argument("vote_all: count/label size mismatch");
    double sums[n_classes] = {};
    uint32_t members[n_classes] = {};
    for (size_t i = 0; i < counts.size(); ++i) {
        sums[labels.labels[i]] += counts[i];
        members[labels.labels[i]]++;
    }
    return argmax_class_means(sums, members);
}

int32_t vote_most_spiked(std::span<const uint32_t> counts, const LabelAssignment& labels) {
    if (counts.size() != labels.size() || counts.empty())
        throw std::invalid_argument("vote_most_spiked: count/label size mismatch");
    size_t best = 0;
    for (size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[best]) best = i;
    return labels.labels[best];
}

int32_t vote_top_percent(std::span<const uint32_t> counts, const LabelAssignment& labels,
                         double percent) {
    if (counts.size() != labels.size() || counts.empty())
        throw std::invalid_argument("vote_top_percent: count/label size mismatch");
    if (!(percent > 0.0 && percent <= 100.0))
        throw std::invalid_argument("vote_top_percent: percent must lie in (0, 100]");
    const size_t take = static_cast<size_t>(
        std::ceil(percent / 100.0 * static_cast<double>(counts.size())));
    std::vector<uint32_t> order(counts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return counts[a] > counts[b]; });
    double sums[n_classes] = {};
    uint32_t members[n_classes] = {};
    for (size_t k = 0; k < take; ++k) {
        const uint32_t i = order[k];
        sums[labels.labels[i]] += counts[i];
        members[labels.labels[i]]++;
    }
    return argmax_class_means(sums, members);
}

void VoteVectorStore::add(std::span<const uint32_t> vec, int32_t label) {
    if (vec.size() != n_patches)
        throw std::invalid_argument("vote store: vector length mismatch");
    vectors.insert(vectors.end(), vec.begin(), vec.end());
    labels.push_back(label);
}

std::span<const uint32_t> VoteVectorStore::vector_of(size_t i) const {
    return {vectors.data() + i * n_patches, n_patches};
}

VoteVectorStore build_vote_store(std::span<const SpikeRecord> log) {
    VoteVectorStore store;
    if (log.empty()) return store;
    store.n_patches = static_cast<uint32_t>(log.front().patch_argmax.size());
    for (const auto& rec : log) store.add(rec.patch_argmax, rec.label);
    return store;
}

int32_t vote_correlation(std::span<const uint32_t> test_vector, const VoteVectorStore& store) {
    if (store.size() == 0) throw std::invalid_argument("vote_correlation: empty store");
    if (test_vector.size() != store.n_patches)
        throw std::invalid_argument("vote_correlation: vector length mismatch");
    size_t best = 0;
    uint32_t best_dist = UINT32_MAX;
    for (size_t e = 0; e < store.size(); ++e) {
        const uint32_t* v = store.vectors.data() + e * store.n_patches;
        uint32_t dist = 0;
        for (uint32_t p = 0; p < store.n_patches; ++p) dist += (v[p] != test_vector[p]);
        if (dist < best_dist) {
            best_dist = dist;
            best = e;
        }
    }
    return store.labels[best];
}

std::vector<std::pair<uint64_t, double>> accuracy_curve(std::span<const SpikeRecord> log,
                                                        uint32_t window) {
    if (window == 0) throw std::invalid_argument("accuracy_curve: window must be positive");
    if (log.size() < 2ull * window)
        throw std::invalid_argument("accuracy_curve: need at least two full windows");
    std::vector<std::pair<uint64_t, double>> points;
    const size_t full = log.size() / window;
    for (size_t i = 1; i < full; ++i) {
        const auto fit = assign_labels(log.subspan((i - 1) * window, window));
        uint32_t correct = 0;
        for (size_t j = i * window; j < (i + 1) * window; ++j)
            if (vote_all(log[j].exc_counts, fit) == log[j].label) correct++;
        points.emplace_back((i + 1) * window, static_cast<double>(correct) / window);
    }
    return points;
}

}  // namespace csnn
