#include "doctest.h"

#include <string>

#include "csnn/evaluation.hpp"
#include "oracles.hpp"

using namespace csnn;

namespace {

SpikeRecord record(int32_t label, std::vector<uint32_t> counts,
                   std::vector<uint32_t> argmax = {}) {
    SpikeRecord r;
    r.label = label;
    r.exc_counts = std::move(counts);
    r.patch_argmax = std::move(argmax);
    return r;
}

// One record per class in order, n neurons.
std::vector<SpikeRecord> one_per_class(size_t n,
                                       const std::function<uint32_t(uint32_t, size_t)>& count) {
    std::vector<SpikeRecord> log;
    for (uint32_t c = 0; c < n_classes; ++c) {
        std::vector<uint32_t> counts(n);
        for (size_t i = 0; i < n; ++i) counts[i] = count(c, i);
        log.push_back(record(static_cast<int32_t>(c), std::move(counts)));
    }
    return log;
}

LabelAssignment labels_of(std::vector<int32_t> labels) {
    LabelAssignment a;
    a.labels = std::move(labels);
    a.mean_rates.assign(a.labels.size() * n_classes, 0.0);
    a.dead.assign(a.labels.size(), 0);
    return a;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("neurons take the class with their highest mean response") {
    // neuron 0 prefers class 3, neuron 1 prefers class 7, neuron 2 is silent
    auto log = one_per_class(3, [](uint32_t c, size_t i) -> uint32_t {
        if (i == 0) return c == 3 ? 9 : 1;
        if (i == 1) return c == 7 ? 5 : 0;
        return 0;
    });
    // double up class 3 to exercise the mean (not the sum)
    log.push_back(record(3, {9, 0, 0}));
    const LabelAssignment a = assign_labels(log);
    REQUIRE(a.size() == 3);
    CHECK(a.labels[0] == 3);
    CHECK(a.labels[1] == 7);
    CHECK(a.dead == std::vector<uint8_t>{0, 0, 1});
    CHECK(a.dead_count() == 1);
    CHECK(a.labels[2] == 0);  // all-zero means tie toward class 0
    CHECK(a.mean_rates[0 * n_classes + 3] == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(a.mean_rates[0 * n_classes + 0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.mean_rates[1 * n_classes + 7] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("mean ties resolve toward the lower class") {
    const auto log = one_per_class(1, [](uint32_t c, size_t) -> uint32_t {
        return (c == 2 || c == 5) ? 4 : 0;
    });
    CHECK(assign_labels(log).labels[0] == 2);
}

TEST_CASE("label fitting rejects bad logs by name") {
    std::vector<SpikeRecord> log;
    for (uint32_t c = 0; c < n_classes - 1; ++c) log.push_back(record(c, {1}));
    try {
        assign_labels(log);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("class 9") != std::string::npos);
    }

    auto bad = one_per_class(1, [](uint32_t, size_t) { return 1u; });
    bad.push_back(record(10, {1}));
    CHECK_THROWS_AS(assign_labels(bad), DataError);
    bad.back().label = -1;
    CHECK_THROWS_AS(assign_labels(bad), DataError);
    CHECK_THROWS_AS(assign_labels(std::vector<SpikeRecord>{}), DataError);
}

TEST_CASE("vote_all compares class means, empty classes score zero") {
    const LabelAssignment a = labels_of({0, 0, 1});
    CHECK(vote_all(std::vector<uint32_t>{4, 2, 10}, a) == 1);  // 3 vs 10
    CHECK(vote_all(std::vector<uint32_t>{4, 4, 3}, a) == 0);   // 4 vs 3
    CHECK(vote_all(std::vector<uint32_t>{4, 4, 4}, a) == 0);   // tie, lower class
    CHECK(vote_all(std::vector<uint32_t>{0, 0, 0}, a) == 0);   // all silent
    CHECK_THROWS_AS(vote_all(std::vector<uint32_t>{1, 2}, a), std::invalid_argument);
}

TEST_CASE("vote_most_spiked takes the single winner, first on count ties") {
    const LabelAssignment a = labels_of({3, 4, 6});
    CHECK(vote_most_spiked(std::vector<uint32_t>{5, 9, 9}, a) == 4);
    CHECK(vote_most_spiked(std::vector<uint32_t>{7, 1, 2}, a) == 3);
    CHECK_THROWS_AS(vote_most_spiked(std::vector<uint32_t>{}, labels_of({})),
                    std::invalid_argument);
}

TEST_CASE("vote_top_percent keeps the most active slice with index-tie cutoff") {
    const LabelAssignment a = labels_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 0});
    // take = ceil(0.1 * 10) = 1: the tied max at the lower index wins
    const std::vector<uint32_t> counts = {9, 9, 5, 0, 0, 0, 0, 0, 0, 0};
    CHECK(vote_top_percent(counts, a, 10.0) == 1);
    // 25% of 10 -> 3 neurons: indices 0, 1, 2 with counts 9, 9, 5
    CHECK(vote_top_percent(counts, a, 25.0) == 1);

    CHECK_THROWS_AS(vote_top_percent(counts, a, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(vote_top_percent(counts, a, 100.5), std::invalid_argument);
    CHECK_THROWS_AS(vote_top_percent(counts, a, -3.0), std::invalid_argument);
}

TEST_CASE("top percent at 100 equals vote_all; a slice of one equals most spiked") {
    oracle::CaseRng rng(81);
    for (int trial = 0; trial < 1000; ++trial) {
        const size_t n = 1 + rng.integer(40);
        std::vector<uint32_t> counts(n);
        std::vector<int32_t> lbl(n);
        for (size_t i = 0; i < n; ++i) {
            counts[i] = static_cast<uint32_t>(rng.integer(12));
            lbl[i] = static_cast<int32_t>(rng.integer(n_classes));
        }
        // all-silent vectors hit the schemes' distinct fallbacks instead of
        // their shared ranking
        counts[rng.integer(n)] += 1;
        const LabelAssignment a = labels_of(lbl);
        REQUIRE(vote_top_percent(counts, a, 100.0) == vote_all(counts, a));
        if (n <= 10)  // ceil(0.1 n) == 1
            REQUIRE(vote_top_percent(counts, a, 10.0) == vote_most_spiked(counts, a));
    }
}

TEST_CASE("the vote store keeps per-example vectors and labels") {
    VoteVectorStore store;
    store.n_patches = 3;
    store.add(std::vector<uint32_t>{1, 2, 3}, 7);
    store.add(std::vector<uint32_t>{4, 5, 6}, 2);
    REQUIRE(store.size() == 2);
    CHECK(store.vector_of(0)[0] == 1);
    CHECK(store.vector_of(1)[2] == 6);
    CHECK_THROWS_AS(store.add(std::vector<uint32_t>{1}, 0), std::invalid_argument);

    std::vector<SpikeRecord> log = {record(4, {1}, {0, 1}), record(6, {1}, {1, 1})};
    const VoteVectorStore built = build_vote_store(log);
    CHECK(built.n_patches == 2);
    CHECK(built.size() == 2);
    CHECK(built.labels == std::vector<int32_t>{4, 6});
}

TEST_CASE("correlation voting is 1-nearest-neighbor under Hamming distance") {
    oracle::CaseRng rng(4242);
    for (int trial = 0; trial < 50; ++trial) {
        VoteVectorStore store;
        store.n_patches = 1 + static_cast<uint32_t>(rng.integer(6));
        const size_t n_stored = 1 + rng.integer(60);
        for (size_t e = 0; e < n_stored; ++e) {
            std::vector<uint32_t> v(store.n_patches);
            for (auto& x : v) x = static_cast<uint32_t>(rng.integer(5));
            store.add(v, static_cast<int32_t>(rng.integer(n_classes)));
        }
        for (int probe = 0; probe < 20; ++probe) {
            std::vector<uint32_t> q(store.n_patches);
            for (auto& x : q) x = static_cast<uint32_t>(rng.integer(5));

            // brute force, first minimum kept
            size_t best = 0;
            uint32_t best_dist = UINT32_MAX;
            for (size_t e = 0; e < n_stored; ++e) {
                uint32_t d = 0;
                for (uint32_t p = 0; p < store.n_patches; ++p)
                    d += (store.vector_of(e)[p] != q[p]);
                if (d < best_dist) {
                    best_dist = d;
                    best = e;
                }
            }
            REQUIRE(vote_correlation(q, store) == store.labels[best]);
        }
    }

    // an exact match is at distance zero and wins outright
    VoteVectorStore store;
    store.n_patches = 2;
    store.add(std::vector<uint32_t>{5, 5}, 1);
    store.add(std::vector<uint32_t>{7, 2}, 8);
    CHECK(vote_correlation(std::vector<uint32_t>{7, 2}, store) == 8);
    // equidistant candidates: the earliest stored example wins
    CHECK(vote_correlation(std::vector<uint32_t>{5, 2}, store) == 1);

    CHECK_THROWS_AS(vote_correlation(std::vector<uint32_t>{1, 2}, VoteVectorStore{}),
                    std::invalid_argument);
}

TEST_CASE("the accuracy curve scores each window with the previous window's labels") {
    // one neuron per class, firing only for its class: every window fits
    // perfect labels and the next window scores 1.0
    std::vector<SpikeRecord> log;
    for (int rep = 0; rep < 4; ++rep)
        for (uint32_t c = 0; c < n_classes; ++c) {
            std::vector<uint32_t> counts(n_classes, 0);
            counts[c] = 5;
            log.push_back(record(static_cast<int32_t>(c), std::move(counts)));
        }
    const auto curve = accuracy_curve(log, 10);
    REQUIRE(curve.size() == 3);
    for (size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].first == (i + 2) * 10);
        CHECK(curve[i].second == doctest::Approx(1.0).epsilon(1e-15));
    }

    CHECK_THROWS_AS(accuracy_curve(log, 0), std::invalid_argument);
    CHECK_THROWS_AS(accuracy_curve(std::span<const SpikeRecord>(log.data(), 19), 10),
                    std::invalid_argument);
}

TEST_CASE("labels carry no information on shuffled data: chance-level accuracy") {
    oracle::CaseRng rng(515);
    std::vector<SpikeRecord> log;
    for (int e = 0; e < 500; ++e) {
        std::vector<uint32_t> counts(20);
        for (auto& c : counts) c = static_cast<uint32_t>(rng.integer(8));
        log.push_back(record(static_cast<int32_t>(rng.integer(n_classes)), std::move(counts)));
    }
    const auto curve = accuracy_curve(log, 250);
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].first == 500);
    CHECK(std::abs(curve[0].second - 0.1) < oracle::chance_accuracy_3sigma);
}

}  // TEST_SUITE
