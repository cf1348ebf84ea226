#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "csnn/checkpoint.hpp"
#include "csnn/engine.hpp"
#include "csnn/evaluation.hpp"
#include "csnn/idx.hpp"
#include "csnn/metrics.hpp"
#include "csnn/network.hpp"
#include "csnn/pgm.hpp"
#include "csnn/run_config.hpp"

namespace fs = std::filesystem;
using namespace csnn;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string checkpoint_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
    std::optional<uint64_t> limit_train;
    std::optional<uint64_t> limit_test;
    std::vector<std::string> voting;
    std::string resume_path;
    std::vector<uint64_t> seeds;
    uint32_t jobs = 1;
    uint64_t fit_labels = 0;
};

void apply_overrides(RunConfig& cfg, const CommonFlags& f) {
    if (f.seed) cfg.seed = *f.seed;
    if (f.limit_train) cfg.run.limit_train = *f.limit_train;
    if (f.limit_test) cfg.run.limit_test = *f.limit_test;
    if (!f.out_dir.empty()) cfg.run.out_dir = f.out_dir;
    if (!f.voting.empty()) {
        cfg.run.voting.clear();
        for (const auto& v : f.voting) cfg.run.voting.push_back(voting_from_string(v));
    }
    cfg.validate();
}

Simulator build_simulator(const RunConfig& cfg) {
    Network net = instantiate_network(cfg.network_spec(), cfg.exc, cfg.inh, cfg.plasticity,
                                      cfg.schedule.dt, cfg.seed);
    return Simulator(std::move(net), cfg.schedule, cfg.encoder, cfg.seed);
}

double mean_input_weight(const Network& net) {
    const SynapseGroup& g = net.projections[net.input_projection()];
    double sum = 0;
    for (double w : g.weights) sum += w;
    return g.weights.empty() ? 0.0 : sum / static_cast<double>(g.weights.size());
}

// Latest estimated-accuracy point: labels fitted on the window before last
// predict the last window.
double estimated_accuracy(std::span<const SpikeRecord> log, uint32_t window) {
    if (window == 0 || log.size() < 2ull * window) return std::nan("");
    LabelAssignment fit;
    try {
        fit = assign_labels(log.subspan(log.size() - 2ull * window, window));
    } catch (const DataError&) {
        return std::nan("");  // window does not cover every class yet
    }
    uint32_t correct = 0;
    for (size_t j = log.size() - window; j < log.size(); ++j)
        if (vote_all(log[j].exc_counts, fit) == log[j].label) correct++;
    return static_cast<double>(correct) / window;
}

MetricsRow metrics_row(const Simulator& sim, std::span<const SpikeRecord> log,
                       uint64_t done, uint32_t window) {
    MetricsRow row;
    row.iteration = done;
    row.estimated_accuracy = estimated_accuracy(log, window);
    const size_t tail = std::min<size_t>(log.size(), window);
    const auto recent = log.subspan(log.size() - tail, tail);
    const auto rates = measure_rates(recent, sim.network().n_input(),
                                     sim.schedule().present_steps());
    row.r_x = rates.r_x;
    row.r_e = rates.r_e;
    row.mean_weight = mean_input_weight(sim.network());
    uint64_t exc = 0;
    for (const auto& r : recent) exc += r.total_exc();
    row.spikes_per_example = static_cast<double>(exc) / static_cast<double>(tail);
    return row;
}

void attach_config(TensorArchive& a, const RunConfig& cfg) {
    a.meta["config"] = cfg.to_json();
    a.meta["config_hash"] = std::to_string(cfg.config_hash());
    a.meta["format"] = "csnn-checkpoint";
}

void attach_labels(TensorArchive& a, const LabelAssignment& labels, uint64_t window_used) {
    a.add_i32("labels.assign", labels.labels);
    a.add_f64("labels.mean_rates", labels.mean_rates,
              {labels.size(), static_cast<uint64_t>(n_classes)});
    a.add_u8("labels.dead", labels.dead);
    a.meta["label_window_used"] = window_used;
}

std::optional<LabelAssignment> stored_labels(const TensorArchive& a) {
    if (!a.has("labels.assign")) return std::nullopt;
    LabelAssignment l;
    l.labels = a.i32("labels.assign");
    l.mean_rates = a.f64("labels.mean_rates");
    l.dead = a.u8("labels.dead");
    return l;
}

RunConfig config_from_archive(const TensorArchive& a) {
    if (!a.meta.contains("config"))
        throw DataError("checkpoint: no embedded config");
    return RunConfig::from_json(a.meta.at("config"));
}

int train_one(RunConfig cfg, const std::string& resume_path, std::string& summary) {
    fs::create_directories(cfg.run.out_dir);
    const Dataset ds = load_dataset(cfg.data.train_images, cfg.data.train_labels);
    const auto images = ds.all_intensities();
    const auto labels = ds.all_labels();
    const uint64_t limit =
        cfg.run.limit_train ? std::min<uint64_t>(cfg.run.limit_train, ds.size()) : ds.size();

    Simulator sim = build_simulator(cfg);
    std::vector<SpikeRecord> log;
    uint64_t first = 0;
    if (!resume_path.empty()) {
        const TensorArchive a = load_archive(resume_path);
        const RunConfig embedded = config_from_archive(a);
        if (embedded.config_hash() != cfg.config_hash())
            throw ConfigError("resume: checkpoint config does not match the requested config");
        RestoredState restored = restore_state(sim, a);
        log = std::move(restored.log);
        first = restored.next_ordinal;
        if (first > limit)
            throw ConfigError("resume: checkpoint is past the requested training limit");
    }

    MetricsWriter metrics(fs::path(cfg.run.out_dir) / "metrics.csv");
    TrainHooks hooks;
    hooks.metrics_every = cfg.run.metrics_every;
    hooks.checkpoint_every = cfg.run.checkpoint_every;
    hooks.on_metrics = [&](const Simulator& s, std::span<const SpikeRecord> l, uint64_t done) {
        metrics.append(metrics_row(s, l, done, cfg.run.metrics_every));
    };
    hooks.on_checkpoint = [&](const Simulator& s, std::span<const SpikeRecord> l, uint64_t done) {
        TensorArchive a = snapshot_state(s, l, done);
        attach_config(a, cfg);
        char name[64];
        std::snprintf(name, sizeof name, "checkpoint_%06llu.ckpt",
                      static_cast<unsigned long long>(done));
        save_archive(a, fs::path(cfg.run.out_dir) / name);
    };

    train(sim, images, labels, first, limit - first, log, hooks);

    TensorArchive final_archive = snapshot_state(sim, log, limit);
    attach_config(final_archive, cfg);
    std::optional<LabelAssignment> fitted;
    const uint64_t window = std::min<uint64_t>(cfg.run.label_window, log.size());
    if (window > 0) {
        try {
            fitted = assign_labels(std::span<const SpikeRecord>(log).subspan(log.size() - window));
            attach_labels(final_archive, *fitted, window);
        } catch (const DataError&) {
            // too few examples to cover every class; checkpoint stays unlabeled
        }
    }
    save_archive(final_archive, fs::path(cfg.run.out_dir) / "final.ckpt");
    write_filter_grid(sim.network(), fs::path(cfg.run.out_dir) / "filters.pgm");

    std::ostringstream os;
    const auto rates = measure_rates(log, sim.network().n_input(), sim.schedule().present_steps());
    os << "trained " << (limit - first) << " examples (seed " << cfg.seed << ")\n"
       << "  r_x " << rates.r_x << ", r_e " << rates.r_e << "\n"
       << "  mean input weight " << mean_input_weight(sim.network()) << "\n";
    if (fitted) os << "  dead neurons " << fitted->dead_count() << "\n";
    os << "  wrote " << (fs::path(cfg.run.out_dir) / "final.ckpt").string() << "\n";
    summary = os.str();
    return exit_ok;
}

int cmd_train(const CommonFlags& f) {
    RunConfig base;
    if (!f.resume_path.empty() && f.config_path.empty()) {
        base = config_from_archive(load_archive(f.resume_path));
    } else {
        base = RunConfig::load(f.config_path);
    }
    apply_overrides(base, f);

    if (f.seeds.size() <= 1) {
        if (f.seeds.size() == 1) base.seed = f.seeds[0];
        std::string summary;
        const int rc = train_one(base, f.resume_path, summary);
        std::fputs(summary.c_str(), stdout);
        return rc;
    }

    if (!f.resume_path.empty())
        throw ConfigError("train: --resume cannot be combined with --seeds");

    // One run per seed, out_dir/seed_<k>, at most --jobs at a time.
    std::vector<std::thread> workers;
    std::vector<int> codes(f.seeds.size(), exit_ok);
    std::vector<std::string> summaries(f.seeds.size());
    std::mutex print_mutex;
    std::atomic<size_t> next{0};
    const uint32_t jobs = std::max(1u, f.jobs);
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= f.seeds.size()) return;
            RunConfig cfg = base;
            cfg.seed = f.seeds[i];
            cfg.run.out_dir =
                (fs::path(base.run.out_dir) / ("seed_" + std::to_string(cfg.seed))).string();
            try {
                codes[i] = train_one(cfg, "", summaries[i]);
            } catch (const ConfigError& e) {
                codes[i] = exit_config_error;
                summaries[i] = std::string("seed run failed: ") + e.what() + "\n";
            } catch (const DataError& e) {
                codes[i] = exit_data_error;
                summaries[i] = std::string("seed run failed: ") + e.what() + "\n";
            } catch (const std::exception& e) {
                codes[i] = exit_simulation_fault;
                summaries[i] = std::string("seed run failed: ") + e.what() + "\n";
            }
            std::lock_guard<std::mutex> lock(print_mutex);
            std::fputs(summaries[i].c_str(), stdout);
        }
    };
    for (uint32_t t = 0; t < std::min<size_t>(jobs, f.seeds.size()); ++t)
        workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    int rc = exit_ok;
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

int cmd_eval(const CommonFlags& f) {
    const TensorArchive a = load_archive(f.checkpoint_path);
    RunConfig cfg = config_from_archive(a);
    apply_overrides(cfg, f);
    fs::create_directories(cfg.run.out_dir);

    Simulator sim = build_simulator(cfg);
    RestoredState restored = restore_state(sim, a);

    std::optional<LabelAssignment> labels = stored_labels(a);
    if (f.fit_labels > 0) {
        if (restored.log.size() < f.fit_labels)
            throw ConfigError("eval: --fit-labels window exceeds the stored spike log");
        labels = assign_labels(
            std::span<const SpikeRecord>(restored.log).subspan(restored.log.size() - f.fit_labels));
    }
    if (!labels)
        throw ConfigError("eval: checkpoint has no label assignment; rerun with --fit-labels");

    const bool wants_correlation =
        std::count(cfg.run.voting.begin(), cfg.run.voting.end(), VotingScheme::correlation) > 0;
    VoteVectorStore store;
    if (wants_correlation) {
        store = build_vote_store(restored.log);
        if (store.size() == 0)
            throw ConfigError("eval: correlation voting needs a training spike log");
    }

    const Dataset ds = load_dataset(cfg.data.test_images, cfg.data.test_labels);
    const uint64_t limit =
        cfg.run.limit_test ? std::min<uint64_t>(cfg.run.limit_test, ds.size()) : ds.size();

    std::vector<uint64_t> correct(cfg.run.voting.size(), 0);
    for (uint64_t i = 0; i < limit; ++i) {
        const auto image = ds.image_intensities(i);
        const SpikeRecord rec = sim.present_example(image, ds.labels.labels[i], i, false);
        for (size_t s = 0; s < cfg.run.voting.size(); ++s) {
            int32_t pred = -1;
            switch (cfg.run.voting[s]) {
                case VotingScheme::all: pred = vote_all(rec.exc_counts, *labels); break;
                case VotingScheme::most_spiked:
                    pred = vote_most_spiked(rec.exc_counts, *labels);
                    break;
                case VotingScheme::top_percent:
                    pred = vote_top_percent(rec.exc_counts, *labels, cfg.run.top_percent);
                    break;
                case VotingScheme::correlation:
                    pred = vote_correlation(rec.patch_argmax, store);
                    break;
            }
            correct[s] += (pred == rec.label);
        }
    }

    std::ofstream csv(fs::path(cfg.run.out_dir) / "eval.csv");
    csv << "scheme,correct,total,accuracy\n";
    for (size_t s = 0; s < cfg.run.voting.size(); ++s) {
        const double acc = limit ? static_cast<double>(correct[s]) / limit : 0.0;
        std::printf("vote_%s: %.4f (%llu/%llu)\n", to_string(cfg.run.voting[s]).c_str(), acc,
                    static_cast<unsigned long long>(correct[s]),
                    static_cast<unsigned long long>(limit));
        csv << to_string(cfg.run.voting[s]) << "," << correct[s] << "," << limit << "," << acc
            << "\n";
    }
    return exit_ok;
}

int cmd_inspect(const CommonFlags& f) {
    const TensorArchive a = load_archive(f.checkpoint_path);
    RunConfig cfg = config_from_archive(a);
    if (!f.out_dir.empty()) cfg.run.out_dir = f.out_dir;
    fs::create_directories(cfg.run.out_dir);

    Simulator sim = build_simulator(cfg);
    restore_state(sim, a);
    const Network& net = sim.network();

    write_filter_grid(net, fs::path(cfg.run.out_dir) / "filters.pgm");

    std::printf("architecture: %s\n",
                cfg.architecture.kind == NetworkSpec::Kind::baseline ? "baseline" : "csnn");
    std::printf("neurons: input %u, exc %u, inh %u\n", net.n_input(), net.n_exc(), net.n_inh());
    for (const auto& g : net.projections) {
        double lo = g.weights.empty() ? 0 : g.weights[0], hi = lo, sum = 0;
        for (double w : g.weights) {
            lo = std::min(lo, w);
            hi = std::max(hi, w);
            sum += w;
        }
        std::printf("projection %s: %zu connections, %u weights%s, min %.6g mean %.6g max %.6g\n",
                    g.name.c_str(), g.connection_count(), g.n_slots,
                    g.plastic ? " (plastic)" : "", lo,
                    g.weights.empty() ? 0.0 : sum / static_cast<double>(g.weights.size()), hi);
    }
    double tlo = net.exc.theta.empty() ? 0 : net.exc.theta[0], thi = tlo, tsum = 0;
    for (double t : net.exc.theta) {
        tlo = std::min(tlo, t);
        thi = std::max(thi, t);
        tsum += t;
    }
    std::printf("theta: min %.6g mean %.6g max %.6g\n", tlo,
                net.exc.theta.empty() ? 0.0 : tsum / static_cast<double>(net.exc.theta.size()),
                thi);

    const SynapseGroup& in = net.projections[net.input_projection()];
    uint32_t dead_by_weight = 0;
    for (uint32_t j = 0; j < in.n_post; ++j) {
        const auto w = incoming_weights(in, j);
        bool all_zero = true;
        for (double x : w)
            if (x != 0.0) { all_zero = false; break; }
        dead_by_weight += all_zero;
    }
    std::printf("dead neurons (all-zero input weights): %u\n", dead_by_weight);
    if (auto labels = stored_labels(a))
        std::printf("dead neurons (no spikes in label window): %u\n", labels->dead_count());
    std::printf("wrote %s\n", (fs::path(cfg.run.out_dir) / "filters.pgm").string().c_str());
    return exit_ok;
}

struct CostFlags {
    double n = 0, m = 0, steps = 0, r_x = -1, r_e = -1;
    std::string checkpoint_path;
    uint64_t examples = 1;
};

int cmd_cost(const CostFlags& f) {
    CostInputs in;
    if (!f.checkpoint_path.empty()) {
        const TensorArchive a = load_archive(f.checkpoint_path);
        RunConfig cfg = config_from_archive(a);
        Simulator sim = build_simulator(cfg);
        RestoredState restored = restore_state(sim, a);
        if (restored.log.empty()) throw DataError("cost: checkpoint has an empty spike log");
        const auto rates = measure_rates(restored.log, sim.network().n_input(),
                                         sim.schedule().present_steps());
        in.n = sim.network().n_input();
        in.m = sim.network().n_exc();
        in.steps = sim.schedule().present_steps() + sim.schedule().rest_steps();
        in.r_x = rates.r_x;
        in.r_e = rates.r_e;
    } else {
        if (f.n <= 0 || f.m <= 0 || f.steps <= 0 || f.r_x < 0 || f.r_e < 0)
            throw ConfigError("cost: need --checkpoint or all of --n --m --steps --r-x --r-e");
        in = {f.n, f.m, f.steps, f.r_x, f.r_e};
    }
    const CostEstimate est = estimate_cost(in);
    std::printf("n %g, m %g, steps %g, r_x %g, r_e %g\n", in.n, in.m, in.steps, in.r_x, in.r_e);
    std::printf("operations per example: %.17g\n", est.operations);
    std::printf("memory words: %.17g\n", est.memory_words);
    if (f.examples > 1)
        std::printf("operations for %llu examples: %.17g\n",
                    static_cast<unsigned long long>(f.examples),
                    est.operations * static_cast<double>(f.examples));
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spiking network trainer"};
    app.require_subcommand(1);

    CommonFlags flags;
    CostFlags cost_flags;

    CLI::App* train_cmd = app.add_subcommand("train", "train a network with STDP");
    train_cmd->add_option("--config", flags.config_path, "run configuration (JSON)");
    train_cmd->add_option("--seed", flags.seed, "override the config seed");
    train_cmd->add_option("--limit-train", flags.limit_train, "cap on training examples");
    train_cmd->add_option("--out-dir", flags.out_dir, "output directory");
    train_cmd->add_option("--voting", flags.voting, "voting schemes")->delimiter(',');
    train_cmd->add_option("--resume", flags.resume_path, "checkpoint to continue from");
    train_cmd->add_option("--seeds", flags.seeds, "train one run per seed")->delimiter(',');
    train_cmd->add_option("--jobs", flags.jobs, "parallel seed runs");

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a trained checkpoint");
    eval_cmd->add_option("--checkpoint", flags.checkpoint_path, "trained checkpoint")->required();
    eval_cmd->add_option("--limit-test", flags.limit_test, "cap on test examples");
    eval_cmd->add_option("--voting", flags.voting, "voting schemes")->delimiter(',');
    eval_cmd->add_option("--out-dir", flags.out_dir, "output directory");
    eval_cmd->add_option("--fit-labels", flags.fit_labels,
                         "refit labels from the last N logged training examples");

    CLI::App* inspect_cmd = app.add_subcommand("inspect", "dump filters and weight stats");
    inspect_cmd->add_option("--checkpoint", flags.checkpoint_path, "checkpoint")->required();
    inspect_cmd->add_option("--out-dir", flags.out_dir, "output directory");

    CLI::App* cost_cmd = app.add_subcommand("cost", "analytic cost model");
    cost_cmd->add_option("--n", cost_flags.n, "input neurons");
    cost_cmd->add_option("--m", cost_flags.m, "excitatory neurons");
    cost_cmd->add_option("--steps", cost_flags.steps, "timesteps per example");
    cost_cmd->add_option("--r-x", cost_flags.r_x, "input spike rate per neuron per step");
    cost_cmd->add_option("--r-e", cost_flags.r_e, "excitatory spike rate per neuron per step");
    cost_cmd->add_option("--checkpoint", cost_flags.checkpoint_path,
                         "derive n, m and rates from a checkpoint");
    cost_cmd->add_option("--examples", cost_flags.examples, "scale operations to a run length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (train_cmd->parsed()) {
            if (flags.config_path.empty() && flags.resume_path.empty())
                throw ConfigError("train: --config or --resume is required");
            return cmd_train(flags);
        }
        if (eval_cmd->parsed()) return cmd_eval(flags);
        if (inspect_cmd->parsed()) return cmd_inspect(flags);
        return cmd_cost(cost_flags);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_error;
    } catch (const SimulationFault& e) {
        std::fprintf(stderr, "simulation fault: %s (neuron %zu in %s, example %lld)\n", e.what(),
                     e.neuron_index, e.population.c_str(),
                     static_cast<long long>(e.example_ordinal));
        if (e.last_checkpoint_ordinal >= 0)
            std::fprintf(stderr, "last good checkpoint: example %lld\n",
                         static_cast<long long>(e.last_checkpoint_ordinal));
        return exit_simulation_fault;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_data_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
