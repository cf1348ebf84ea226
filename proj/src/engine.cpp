#include "csnn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csnn {

void Schedule::validate() const {
    if (dt <= 0) throw ConfigError("schedule: dt must be positive");
    if (present_ms <= 0) throw ConfigError("schedule: present_ms must be positive");
    if (rest_ms < 0) throw ConfigError("schedule: rest_ms must be non-negative");
    auto whole = [this](double ms) {
        const double steps = ms / dt;
        return std::abs(steps - std::round(steps)) < 1e-9;
    };
    if (!whole(present_ms) || !whole(rest_ms))
        throw ConfigError("schedule: phase durations must be whole multiples of dt");
}

uint64_t SpikeRecord::total_exc() const {
    uint64_t t = 0;
    for (uint32_t c : exc_counts) t += c;
    return t;
}

CostEstimate estimate_cost(const CostInputs& in) {
    if (in.n < 1 || in.m < 1) throw std::invalid_argument("estimate_cost: need n, m >= 1");
    if (in.steps < 1) throw std::invalid_argument("estimate_cost: need steps >= 1");
    if (in.r_x < 0 || in.r_x > 1 || in.r_e < 0 || in.r_e > 1)
        throw std::invalid_argument("estimate_cost: rates must lie in [0, 1]");
    const double lateral = (in.m - 1) * (in.m - 1);
    CostEstimate out;
    out.operations = in.steps * (3 * in.m + 2 * in.n * in.m + lateral +
                                 in.r_x * in.m + in.r_e * in.n);
    out.memory_words = 3 * in.n * in.m + lateral + 3 * in.m;
    return out;
}

MeasuredRates measure_rates(std::span<const SpikeRecord> log, uint32_t n_input,
                            uint32_t steps_per_example) {
    if (log.empty()) throw std::invalid_argument("measure_rates: empty log");
    if (n_input == 0 || steps_per_example == 0)
        throw std::invalid_argument("measure_rates: need n_input, steps >= 1");
    uint64_t input_total = 0, exc_total = 0;
    const size_t m = log.front().exc_counts.size();
    for (const auto& r : log) {
        input_total += r.input_spikes;
        exc_total += r.total_exc();
    }
    const double denom = static_cast<double>(log.size()) * steps_per_example;
    MeasuredRates rates;
    rates.r_x = static_cast<double>(input_total) / (denom * n_input);
    rates.r_e = static_cast<double>(exc_total) / (denom * static_cast<double>(m));
    return rates;
}

namespace {

uint64_t accounted_step_budget(const Network& net) {
    // Conductance updates per step at the analytic budget (lateral
    // inhibition counts as (m-1)^2) plus one trace value per plastic
    // connection.
    uint64_t total = 0;
    for (size_t i = 0; i < net.projections.size(); ++i) {
        const auto& g = net.projections[i];
        if (net.spec.projections[i].rule == ProjectionRule::all_but_source) {
            const uint64_t m = g.n_post;
            total += (m - 1) * (m - 1);
        } else {
            total += g.connection_count();
        }
        if (g.plastic) total += g.connection_count();
    }
    return total;
}

}  // namespace

Simulator::Simulator(Network net, Schedule sched, EncoderConfig enc, uint64_t seed)
    : net_(std::move(net)), sched_(sched), enc_(enc), seed_(seed) {
    sched_.validate();
    enc_.validate();
    input_prev_.assign(net_.n_input(), 0);
    exc_prev_.assign(net_.n_exc(), 0);
    inh_prev_.assign(net_.n_inh(), 0);
    incr_exc_.assign(net_.n_exc(), 0.0);
    incr_inh_.assign(net_.n_inh(), 0.0);
    accounted_per_step_ = accounted_step_budget(net_);
}

void Simulator::advance(const uint8_t* input_mask, bool learning, SpikeRecord* rec) {
    const int64_t now = ++step_;
    const uint32_t n_in = net_.n_input();
    const uint32_t n_exc = net_.n_exc();
    const uint32_t n_inh = net_.n_inh();

    decay_conductances(net_.exc, net_.exc_params, sched_.dt);
    decay_conductances(net_.inh, net_.inh_params, sched_.dt);
    counters_.executed_conductance_decays += 2ull * (n_exc + n_inh);
    counters_.accounted += accounted_per_step_;

    auto mask_of = [&](Pop p) -> const uint8_t* {
        switch (p) {
            case Pop::input: return input_prev_.data();
            case Pop::exc: return exc_prev_.data();
            default: return inh_prev_.data();
        }
    };

    for (size_t pi = 0; pi < net_.projections.size(); ++pi) {
        const SynapseGroup& g = net_.projections[pi];
        const uint8_t* src = mask_of(net_.source_of[pi]);
        const bool to_exc = net_.target_of[pi] == Pop::exc;
        std::vector<double>& incr = to_exc ? incr_exc_ : incr_inh_;
        std::fill(incr.begin(), incr.end(), 0.0);
        bool any = false;
        for (uint32_t pre = 0; pre < g.n_pre; ++pre) {
            if (!src[pre]) continue;
            any = true;
            for (uint32_t c = g.pre_offsets[pre]; c < g.pre_offsets[pre + 1]; ++c) {
                incr[g.post_of[c]] += g.weights[g.weight_slot[c]];
                counters_.executed_injections++;
            }
        }
        if (any) inject_spikes(to_exc ? net_.exc : net_.inh, incr, g.polarity);
    }

    if (learning) {
        for (size_t pi = 0; pi < net_.projections.size(); ++pi) {
            SynapseGroup& g = net_.projections[pi];
            if (!g.plastic) continue;
            const uint8_t* src = mask_of(net_.source_of[pi]);
            event_scratch_.clear();
            for (uint32_t i = 0; i < g.n_pre; ++i)
                if (src[i]) event_scratch_.push_back(i);
            if (!event_scratch_.empty()) {
                const StdpStats st = apply_pre_spike_batch(g, event_scratch_, now);
                counters_.executed_trace_updates += st.trace_updates;
                counters_.executed_weight_updates += st.weight_updates;
            }
        }
    }

    try {
        step_lif(net_.exc, net_.exc_params, sched_.dt, now, exc_now_, learning);
    } catch (SimulationFault& f) {
        f.population = "exc";
        throw;
    }
    try {
        step_lif(net_.inh, net_.inh_params, sched_.dt, now, inh_now_, learning);
    } catch (SimulationFault& f) {
        f.population = "inh";
        throw;
    }
    counters_.executed_voltage_updates += n_exc + n_inh;

    if (learning) {
        for (size_t pi = 0; pi < net_.projections.size(); ++pi) {
            SynapseGroup& g = net_.projections[pi];
            if (!g.plastic) continue;
            const uint8_t* dst = net_.target_of[pi] == Pop::exc ? exc_now_.data() : inh_now_.data();
            event_scratch_.clear();
            for (uint32_t i = 0; i < g.n_post; ++i)
                if (dst[i]) event_scratch_.push_back(i);
            if (!event_scratch_.empty()) {
                const StdpStats st = apply_post_spike_batch(g, event_scratch_, now);
                counters_.executed_trace_updates += st.trace_updates;
                counters_.executed_weight_updates += st.weight_updates;
            }
        }
    }

    exc_prev_ = exc_now_;
    inh_prev_ = inh_now_;
    uint64_t input_count = 0;
    if (input_mask) {
        std::copy(input_mask, input_mask + n_in, input_prev_.begin());
        for (uint32_t i = 0; i < n_in; ++i) input_count += input_mask[i];
    } else {
        std::fill(input_prev_.begin(), input_prev_.end(), 0);
    }
    counters_.input_spikes += input_count;

    uint64_t exc_count = 0;
    for (uint32_t i = 0; i < n_exc; ++i) exc_count += exc_now_[i];
    counters_.exc_spikes += exc_count;

    if (rec) {
        rec->input_spikes += input_count;
        for (uint32_t i = 0; i < n_exc; ++i) rec->exc_counts[i] += exc_now_[i];
    }
    counters_.steps++;
}

void Simulator::run_rest(bool learning) {
    if (sched_.reset_between_examples) {
        net_.exc.reset(net_.exc_params);
        net_.inh.reset(net_.inh_params);
        std::fill(input_prev_.begin(), input_prev_.end(), 0);
        std::fill(exc_prev_.begin(), exc_prev_.end(), 0);
        std::fill(inh_prev_.begin(), inh_prev_.end(), 0);
        for (auto& g : net_.projections) {
            if (!g.plastic) continue;
            std::fill(g.a_pre.begin(), g.a_pre.end(), 0.0);
            std::fill(g.a_post.begin(), g.a_post.end(), 0.0);
            std::fill(g.last_update.begin(), g.last_update.end(), step_);
        }
        return;
    }
    const uint32_t steps = sched_.rest_steps();
    for (uint32_t t = 0; t < steps; ++t) advance(nullptr, learning, nullptr);
}

void Simulator::run_presentation(std::span<const double> image, double rate_hz, bool learning,
                                 Rng& rng, SpikeRecord& rec) {
    const uint32_t steps = sched_.present_steps();
    poisson_spikes(image, rate_hz, sched_.dt, steps, rng, train_);
    rec.exc_counts.assign(net_.n_exc(), 0);
    rec.input_spikes = 0;
    const size_t n = image.size();
    for (uint32_t t = 0; t < steps; ++t)
        advance(train_.data() + static_cast<size_t>(t) * n, learning, &rec);
}

SpikeRecord Simulator::present_example(std::span<const double> image, int32_t label,
                                       uint64_t ordinal, bool learning) {
    if (image.size() != net_.n_input())
        throw std::invalid_argument("present_example: image size mismatch");
    const bool blank = std::all_of(image.begin(), image.end(), [](double v) { return v == 0.0; });

    SpikeRecord rec;
    rec.ordinal = ordinal;
    rec.label = label;
    double rate = enc_.rate_scale_hz;
    uint32_t attempt = 0;
    try {
        for (;;) {
            Rng rng(derive_seed(seed_, ordinal, attempt));
            run_presentation(image, rate, learning, rng, rec);
            if (!enc_.escalation_enabled || blank) break;
            if (rec.total_exc() >= enc_.min_exc_spikes) break;
            if (attempt >= enc_.max_escalations) break;
            attempt++;
            rate += enc_.escalation_hz;
            run_rest(learning);
        }
        rec.escalations = attempt;

        const uint32_t patches = net_.spec.n_patches();
        const uint32_t per = net_.spec.neurons_per_patch();
        rec.patch_argmax.assign(patches, 0);
        for (uint32_t p = 0; p < patches; ++p) {
            uint32_t best = 0;
            for (uint32_t l = 1; l < per; ++l)
                if (rec.exc_counts[p * per + l] > rec.exc_counts[p * per + best]) best = l;
            rec.patch_argmax[p] = best;
        }

        run_rest(learning);
    } catch (SimulationFault& f) {
        f.example_ordinal = static_cast<int64_t>(ordinal);
        throw;
    }
    return rec;
}

void train(Simulator& sim, std::span<const std::vector<double>> images,
           std::span<const int32_t> labels, uint64_t first, uint64_t count,
           std::vector<SpikeRecord>& log, const TrainHooks& hooks) {
    if (first + count > images.size() || images.size() != labels.size())
        throw std::invalid_argument("train: example range out of bounds");
    int64_t last_checkpoint = -1;
    for (uint64_t i = 0; i < count; ++i) {
        const uint64_t ord = first + i;
        try {
            log.push_back(sim.present_example(images[ord], labels[ord], ord, true));
        } catch (SimulationFault& f) {
            f.last_checkpoint_ordinal = last_checkpoint;
            throw;
        }
        const uint64_t done = ord + 1;
        if (hooks.metrics_every && done % hooks.metrics_every == 0 && hooks.on_metrics)
            hooks.on_metrics(sim, log, done);
        if (hooks.checkpoint_every && done % hooks.checkpoint_every == 0 && hooks.on_checkpoint) {
            hooks.on_checkpoint(sim, log, done);
            last_checkpoint = static_cast<int64_t>(done);
        }
    }
}

}  // namespace csnn
