#include "doctest.h"

#include <cmath>
#include <limits>

#include "csnn/lif.hpp"
#include "oracles.hpp"

using namespace csnn;

namespace {

LifParams base_params() {
    LifParams p;
    p.tau_membrane = 100.0;
    p.v_rest = -65.0;
    p.v_reset = -65.0;
    p.v_threshold = -52.0;
    p.theta_plus = 0.05;
    p.tau_theta = 1e7;
    p.refractory_ms = 5.0;
    return p;
}

}  // namespace

TEST_SUITE("lif") {

TEST_CASE("parameter validation enforces voltage ordering and positive constants") {
    LifParams p = base_params();
    CHECK_NOTHROW(p.validate());

    p.v_reset = -50.0;  // above rest
    CHECK_THROWS_AS(p.validate(), ConfigError);

    p = base_params();
    p.v_threshold = -65.0;  // not above rest
    CHECK_THROWS_AS(p.validate(), ConfigError);

    p = base_params();
    p.tau_membrane = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);

    p = base_params();
    p.e_inh = -60.0;  // above rest
    CHECK_THROWS_AS(p.validate(), ConfigError);

    p = base_params();
    p.theta_plus = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("resting state sits at v_rest with cleared conductances") {
    const LifParams p = base_params();
    const LifState s = LifState::resting(5, p);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(s.v[i] == p.v_rest);
        CHECK(s.g_e[i] == 0.0);
        CHECK(s.g_i[i] == 0.0);
        CHECK(s.theta[i] == 0.0);
        CHECK(s.refractory_left[i] == 0.0);
        CHECK(s.last_spike_step[i] == -1);
    }
}

TEST_CASE("one euler step matches the frozen hand value") {
    LifParams p = base_params();
    LifState s = LifState::resting(1, p);
    s.v[0] = -60.0;
    s.g_e[0] = 0.5;
    std::vector<uint8_t> spikes;
    step_lif(s, p, 0.5, 1, spikes);
    CHECK(s.v[0] == doctest::Approx(oracle::euler_one_step).epsilon(1e-12));
    CHECK(spikes[0] == 0);
}

TEST_CASE("conductance decay is exact exponential over many steps") {
    LifParams p = base_params();
    p.tau_ge = 1.0;
    p.tau_gi = 2.0;
    LifState s = LifState::resting(1, p);
    s.g_e[0] = 0.8;
    s.g_i[0] = 0.8;
    decay_conductances(s, p, 0.5);
    CHECK(s.g_e[0] == doctest::Approx(oracle::decay_half_ms).epsilon(1e-12));

    s.g_e[0] = 0.8;
    s.g_i[0] = 0.8;
    for (int k = 0; k < 137; ++k) decay_conductances(s, p, 0.5);
    CHECK(s.g_e[0] ==
          doctest::Approx(oracle::exp_decay(0.8, 137 * 0.5, 1.0)).epsilon(1e-12));
    CHECK(s.g_i[0] ==
          doctest::Approx(oracle::exp_decay(0.8, 137 * 0.5, 2.0)).epsilon(1e-12));
    CHECK(s.g_e[0] >= 0.0);
}

TEST_CASE("threshold comparison is strictly greater-than") {
    // dt/tau = 0.5 makes the update v' = 0.5 v - 32.5 exact in binary, so a
    // start of -39 lands exactly on the -52 threshold.
    LifParams p = base_params();
    p.tau_membrane = 1.0;
    p.theta_plus = 0.0;
    std::vector<uint8_t> spikes;

    LifState s = LifState::resting(1, p);
    s.v[0] = -39.0;
    step_lif(s, p, 0.5, 1, spikes);
    CHECK(s.v[0] == -52.0);
    CHECK(spikes[0] == 0);

    s = LifState::resting(1, p);
    s.v[0] = -38.99999;
    step_lif(s, p, 0.5, 1, spikes);
    CHECK(spikes[0] == 1);
}

TEST_CASE("a spike resets the membrane, bumps theta and starts the refractory hold") {
    LifParams p = base_params();
    LifState s = LifState::resting(1, p);
    s.g_e[0] = 10.0;  // strong drive
    std::vector<uint8_t> spikes;
    int64_t step = 0;
    while (spikes.empty() || spikes[0] == 0) step_lif(s, p, 0.5, ++step, spikes);
    CHECK(s.v[0] == p.v_reset);
    CHECK(s.theta[0] == doctest::Approx(p.theta_plus).epsilon(1e-9));
    CHECK(s.refractory_left[0] == p.refractory_ms);
    CHECK(s.last_spike_step[0] == step);
}

TEST_CASE("refractory neurons hold v_reset and cannot fire whatever the input") {
    LifParams p = base_params();
    LifState s = LifState::resting(1, p);
    s.refractory_left[0] = p.refractory_ms;
    s.g_e[0] = 1e6;
    std::vector<uint8_t> spikes;
    for (int64_t t = 1; t <= 10; ++t) {  // 5 ms at dt = 0.5
        step_lif(s, p, 0.5, t, spikes);
        CHECK(spikes[0] == 0);
        CHECK(s.v[0] == p.v_reset);
    }
    CHECK(s.refractory_left[0] == 0.0);
    step_lif(s, p, 0.5, 11, spikes);  // integrates again, strong drive spikes now
    CHECK(spikes[0] == 1);
}

TEST_CASE("theta decays exponentially inside the step") {
    LifParams p = base_params();
    p.tau_theta = 20.0;
    p.v_threshold = 1e9;  // never spike
    p.v_rest = -65.0;
    LifState s = LifState::resting(1, p);
    s.theta[0] = 0.7;
    std::vector<uint8_t> spikes;
    for (int64_t t = 1; t <= 7; ++t) step_lif(s, p, 0.5, t, spikes);
    CHECK(s.theta[0] == doctest::Approx(oracle::trace_7_steps).epsilon(1e-12));
    CHECK(s.theta[0] >= 0.0);
}

TEST_CASE("with constant conductances the membrane approaches its fixed point monotonically") {
    oracle::CaseRng rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        LifParams p = base_params();
        p.v_threshold = 1e9;
        LifState s = LifState::resting(1, p);
        s.g_e[0] = rng.uniform(0.0, 2.0);
        s.g_i[0] = rng.uniform(0.0, 2.0);
        s.v[0] = rng.uniform(-80.0, -40.0);
        const double g_e = s.g_e[0], g_i = s.g_i[0];
        const double fixed = (p.v_rest + g_e * p.e_exc + g_i * p.e_inh) / (1.0 + g_e + g_i);
        // the Euler update contracts the gap by exactly (1 - a) per step
        const double a = 0.5 * (1.0 + g_e + g_i) / p.tau_membrane;
        const double first_gap = std::abs(s.v[0] - fixed);
        double prev_gap = first_gap;
        std::vector<uint8_t> spikes;
        for (int64_t t = 1; t <= 200; ++t) {
            step_lif(s, p, 0.5, t, spikes);
            s.g_e[0] = g_e;  // hold conductances fixed
            s.g_i[0] = g_i;
            const double gap = std::abs(s.v[0] - fixed);
            CHECK(gap <= prev_gap * (1.0 - a) + 1e-9);
            prev_gap = gap;
        }
        CHECK(prev_gap <= first_gap * std::pow(1.0 - a, 200) + 1e-9);
    }
}

TEST_CASE("non-finite membrane state raises a fault naming the neuron") {
    LifParams p = base_params();
    LifState s = LifState::resting(4, p);
    s.g_e[2] = std::numeric_limits<double>::infinity();
    std::vector<uint8_t> spikes;
    try {
        step_lif(s, p, 0.5, 1, spikes);
        FAIL("expected SimulationFault");
    } catch (const SimulationFault& f) {
        CHECK(f.neuron_index == 2);
    }
}

TEST_CASE("inject accumulates per polarity and rejects negative increments") {
    LifParams p = base_params();
    LifState s = LifState::resting(2, p);
    const std::vector<double> inc1 = {0.3, 0.0};
    const std::vector<double> inc2 = {0.7, 0.2};
    inject_spikes(s, inc1, Polarity::excitatory);
    inject_spikes(s, inc2, Polarity::excitatory);
    CHECK(s.g_e[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.g_e[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s.g_i[0] == 0.0);

    inject_spikes(s, inc2, Polarity::inhibitory);
    CHECK(s.g_i[0] == doctest::Approx(0.7).epsilon(1e-12));

    const std::vector<double> bad = {-0.1, 0.0};
    CHECK_THROWS_AS(inject_spikes(s, bad, Polarity::excitatory), std::invalid_argument);
    const std::vector<double> wrong_size = {0.1};
    CHECK_THROWS_AS(inject_spikes(s, wrong_size, Polarity::excitatory), std::invalid_argument);
}

TEST_CASE("randomized one-step updates match the reference implementation") {
    oracle::CaseRng rng(1234);
    for (int rep = 0; rep < 1000; ++rep) {
        oracle::LifCase c;
        c.tau_m = rng.uniform(5.0, 200.0);
        c.v_rest = rng.uniform(-75.0, -55.0);
        c.v_reset = c.v_rest - rng.uniform(0.0, 10.0);
        c.v_threshold = c.v_rest + rng.uniform(1.0, 20.0);
        c.e_exc = rng.uniform(-10.0, 10.0);
        c.e_inh = c.v_rest - rng.uniform(5.0, 40.0);
        c.theta_plus = rng.uniform(0.0, 0.5);
        c.tau_theta = rng.uniform(10.0, 1e7);
        c.dt = 0.5;
        c.v = rng.uniform(c.v_reset, c.v_threshold + 2.0);
        c.g_e = rng.uniform(0.0, 3.0);
        c.g_i = rng.uniform(0.0, 3.0);
        c.theta = rng.uniform(0.0, 1.0);

        LifParams p;
        p.tau_membrane = c.tau_m;
        p.v_rest = c.v_rest;
        p.v_reset = c.v_reset;
        p.v_threshold = c.v_threshold;
        p.e_exc = c.e_exc;
        p.e_inh = c.e_inh;
        p.theta_plus = c.theta_plus;
        p.tau_theta = c.tau_theta;
        p.refractory_ms = 5.0;
        LifState s = LifState::resting(1, p);
        s.v[0] = c.v;
        s.g_e[0] = c.g_e;
        s.g_i[0] = c.g_i;
        s.theta[0] = c.theta;

        const oracle::LifResult expect = oracle::lif_step(c);
        std::vector<uint8_t> spikes;
        step_lif(s, p, c.dt, 7, spikes);

        REQUIRE(spikes[0] == (expect.spiked ? 1 : 0));
        REQUIRE(s.v[0] == doctest::Approx(expect.v).epsilon(1e-12));
        REQUIRE(s.theta[0] == doctest::Approx(expect.theta).epsilon(1e-12));
        if (expect.spiked) {
            REQUIRE(s.refractory_left[0] == p.refractory_ms);
            REQUIRE(s.last_spike_step[0] == 7);
        }
    }
}

}  // TEST_SUITE
