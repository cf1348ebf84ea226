#include "csnn/run_config.hpp"

#include <fstream>
#include <set>

#include "csnn/checkpoint.hpp"

namespace csnn {

using nlohmann::json;

std::string to_string(VotingScheme v) {
    switch (v) {
        case VotingScheme::all: return "all";
        case VotingScheme::most_spiked: return "most_spiked";
        case VotingScheme::top_percent: return "top_percent";
        default: return "correlation";
    }
}

VotingScheme voting_from_string(const std::string& s) {
    if (s == "all") return VotingScheme::all;
    if (s == "most_spiked") return VotingScheme::most_spiked;
    if (s == "top_percent") return VotingScheme::top_percent;
    if (s == "correlation") return VotingScheme::correlation;
    throw ConfigError("config: unknown voting scheme \"" + s + "\"");
}

namespace {

void check_keys(const json& j, const std::string& context, std::set<std::string> allowed) {
    if (!j.is_object()) throw ConfigError("config: " + context + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError("config: unknown key \"" + key + "\" in " + context);
}

template <typename T>
void fetch(const json& j, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: bad value for \"") + key + "\"");
    }
}

void parse_lif(const json& j, const std::string& context, LifParams& p) {
    check_keys(j, context,
               {"tau_membrane", "v_rest", "v_reset", "v_threshold", "e_exc", "e_inh", "tau_ge",
                "tau_gi", "refractory_ms", "theta_plus", "tau_theta"});
    fetch(j, "tau_membrane", p.tau_membrane);
    fetch(j, "v_rest", p.v_rest);
    fetch(j, "v_reset", p.v_reset);
    fetch(j, "v_threshold", p.v_threshold);
    fetch(j, "e_exc", p.e_exc);
    fetch(j, "e_inh", p.e_inh);
    fetch(j, "tau_ge", p.tau_ge);
    fetch(j, "tau_gi", p.tau_gi);
    fetch(j, "refractory_ms", p.refractory_ms);
    fetch(j, "theta_plus", p.theta_plus);
    fetch(j, "tau_theta", p.tau_theta);
}

json lif_json(const LifParams& p) {
    return {{"tau_membrane", p.tau_membrane},
            {"v_rest", p.v_rest},
            {"v_reset", p.v_reset},
            {"v_threshold", p.v_threshold},
            {"e_exc", p.e_exc},
            {"e_inh", p.e_inh},
            {"tau_ge", p.tau_ge},
            {"tau_gi", p.tau_gi},
            {"refractory_ms", p.refractory_ms},
            {"theta_plus", p.theta_plus},
            {"tau_theta", p.tau_theta}};
}

}  // namespace

void RunConfig::validate() const {
    exc.validate();
    inh.validate();
    plasticity.validate();
    encoder.validate();
    schedule.validate();
    network_spec().validate();
    if (run.top_percent <= 0 || run.top_percent > 100)
        throw ConfigError("config: run.top_percent must lie in (0, 100]");
    if (run.voting.empty()) throw ConfigError("config: run.voting must not be empty");
    if (run.metrics_every == 0) throw ConfigError("config: run.metrics_every must be positive");
}

NetworkSpec RunConfig::network_spec() const {
    if (architecture.kind == NetworkSpec::Kind::baseline) {
        const uint32_t n_input = architecture.conv.input_h * architecture.conv.input_w;
        return build_baseline(n_input, architecture.n_neurons, architecture.exc_inh_strength,
                              architecture.inh_exc_strength);
    }
    return build_csnn(architecture.conv, architecture.exc_inh_strength,
                      architecture.inh_exc_strength);
}

json RunConfig::to_json() const {
    json arch;
    arch["kind"] = architecture.kind == NetworkSpec::Kind::baseline ? "baseline" : "csnn";
    arch["input_height"] = architecture.conv.input_h;
    arch["input_width"] = architecture.conv.input_w;
    arch["exc_inh_strength"] = architecture.exc_inh_strength;
    arch["inh_exc_strength"] = architecture.inh_exc_strength;
    if (architecture.kind == NetworkSpec::Kind::baseline) {
        arch["n_neurons"] = architecture.n_neurons;
    } else {
        arch["kernel"] = architecture.conv.kernel;
        arch["stride"] = architecture.conv.stride;
        arch["n_patches"] = architecture.conv.n_patches;
        arch["shared_weights"] = architecture.conv.shared_weights;
        if (architecture.conv.lattice_m != 0) {
            arch["lattice"] = {{"m", architecture.conv.lattice_m},
                               {"scope", architecture.conv.lattice_scope == LatticeScope::ring
                                             ? "ring"
                                             : "all_pairs"}};
        }
    }

    json voting = json::array();
    for (VotingScheme v : run.voting) voting.push_back(to_string(v));

    return {{"seed", seed},
            {"architecture", arch},
            {"neurons", {{"exc", lif_json(exc)}, {"inh", lif_json(inh)}}},
            {"plasticity",
             {{"eta_pre", plasticity.eta_pre},
              {"eta_post", plasticity.eta_post},
              {"w_max", plasticity.w_max},
              {"tau_pre", plasticity.tau_pre},
              {"tau_post", plasticity.tau_post},
              {"init_scale", plasticity.init_scale}}},
            {"encoder",
             {{"rate_scale_hz", encoder.rate_scale_hz},
              {"escalation_hz", encoder.escalation_hz},
              {"min_exc_spikes", encoder.min_exc_spikes},
              {"max_escalations", encoder.max_escalations},
              {"escalation_enabled", encoder.escalation_enabled}}},
            {"schedule",
             {{"dt", schedule.dt},
              {"present_ms", schedule.present_ms},
              {"rest_ms", schedule.rest_ms},
              {"reset_between_examples", schedule.reset_between_examples}}},
            {"data",
             {{"train_images", data.train_images},
              {"train_labels", data.train_labels},
              {"test_images", data.test_images},
              {"test_labels", data.test_labels}}},
            {"run",
             {{"limit_train", run.limit_train},
              {"limit_test", run.limit_test},
              {"checkpoint_every", run.checkpoint_every},
              {"metrics_every", run.metrics_every},
              {"label_window", run.label_window},
              {"voting", voting},
              {"top_percent", run.top_percent},
              {"out_dir", run.out_dir}}}};
}

uint64_t RunConfig::config_hash() const { return semantic_config_hash(to_json()); }

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    check_keys(j, "top level",
               {"seed", "architecture", "neurons", "plasticity", "encoder", "schedule", "data",
                "run"});
    fetch(j, "seed", cfg.seed);

    if (j.contains("architecture")) {
        const json& a = j.at("architecture");
        check_keys(a, "architecture",
                   {"kind", "n_neurons", "kernel", "stride", "n_patches", "shared_weights",
                    "lattice", "input_height", "input_width", "exc_inh_strength",
                    "inh_exc_strength"});
        std::string kind = "baseline";
        fetch(a, "kind", kind);
        if (kind == "baseline") {
            cfg.architecture.kind = NetworkSpec::Kind::baseline;
            for (const char* key : {"kernel", "stride", "n_patches", "shared_weights", "lattice"})
                if (a.contains(key))
                    throw ConfigError(std::string("config: \"") + key +
                                      "\" only applies to the csnn architecture");
        } else if (kind == "csnn") {
            cfg.architecture.kind = NetworkSpec::Kind::csnn;
            if (a.contains("n_neurons"))
                throw ConfigError("config: \"n_neurons\" only applies to the baseline architecture");
        } else {
            throw ConfigError("config: architecture.kind must be \"baseline\" or \"csnn\"");
        }
        fetch(a, "n_neurons", cfg.architecture.n_neurons);
        fetch(a, "kernel", cfg.architecture.conv.kernel);
        fetch(a, "stride", cfg.architecture.conv.stride);
        fetch(a, "n_patches", cfg.architecture.conv.n_patches);
        fetch(a, "shared_weights", cfg.architecture.conv.shared_weights);
        fetch(a, "input_height", cfg.architecture.conv.input_h);
        fetch(a, "input_width", cfg.architecture.conv.input_w);
        fetch(a, "exc_inh_strength", cfg.architecture.exc_inh_strength);
        fetch(a, "inh_exc_strength", cfg.architecture.inh_exc_strength);
        if (a.contains("lattice")) {
            const json& l = a.at("lattice");
            check_keys(l, "architecture.lattice", {"m", "scope"});
            fetch(l, "m", cfg.architecture.conv.lattice_m);
            std::string scope = "all_pairs";
            fetch(l, "scope", scope);
            if (scope == "all_pairs")
                cfg.architecture.conv.lattice_scope = LatticeScope::all_pairs;
            else if (scope == "ring")
                cfg.architecture.conv.lattice_scope = LatticeScope::ring;
            else
                throw ConfigError("config: lattice.scope must be \"all_pairs\" or \"ring\"");
        }
    }

    if (j.contains("neurons")) {
        check_keys(j.at("neurons"), "neurons", {"exc", "inh"});
        if (j.at("neurons").contains("exc")) parse_lif(j.at("neurons").at("exc"), "neurons.exc", cfg.exc);
        if (j.at("neurons").contains("inh")) parse_lif(j.at("neurons").at("inh"), "neurons.inh", cfg.inh);
    }

    if (j.contains("plasticity")) {
        const json& p = j.at("plasticity");
        check_keys(p, "plasticity",
                   {"eta_pre", "eta_post", "w_max", "tau_pre", "tau_post", "init_scale"});
        fetch(p, "eta_pre", cfg.plasticity.eta_pre);
        fetch(p, "eta_post", cfg.plasticity.eta_post);
        fetch(p, "w_max", cfg.plasticity.w_max);
        fetch(p, "tau_pre", cfg.plasticity.tau_pre);
        fetch(p, "tau_post", cfg.plasticity.tau_post);
        fetch(p, "init_scale", cfg.plasticity.init_scale);
    }

    if (j.contains("encoder")) {
        const json& e = j.at("encoder");
        check_keys(e, "encoder",
                   {"rate_scale_hz", "escalation_hz", "min_exc_spikes", "max_escalations",
                    "escalation_enabled"});
        fetch(e, "rate_scale_hz", cfg.encoder.rate_scale_hz);
        fetch(e, "escalation_hz", cfg.encoder.escalation_hz);
        fetch(e, "min_exc_spikes", cfg.encoder.min_exc_spikes);
        fetch(e, "max_escalations", cfg.encoder.max_escalations);
        fetch(e, "escalation_enabled", cfg.encoder.escalation_enabled);
    }

    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        check_keys(s, "schedule", {"dt", "present_ms", "rest_ms", "reset_between_examples"});
        fetch(s, "dt", cfg.schedule.dt);
        fetch(s, "present_ms", cfg.schedule.present_ms);
        fetch(s, "rest_ms", cfg.schedule.rest_ms);
        fetch(s, "reset_between_examples", cfg.schedule.reset_between_examples);
    }

    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data", {"train_images", "train_labels", "test_images", "test_labels"});
        fetch(d, "train_images", cfg.data.train_images);
        fetch(d, "train_labels", cfg.data.train_labels);
        fetch(d, "test_images", cfg.data.test_images);
        fetch(d, "test_labels", cfg.data.test_labels);
    }

    if (j.contains("run")) {
        const json& r = j.at("run");
        check_keys(r, "run",
                   {"limit_train", "limit_test", "checkpoint_every", "metrics_every",
                    "label_window", "voting", "top_percent", "out_dir"});
        fetch(r, "limit_train", cfg.run.limit_train);
        fetch(r, "limit_test", cfg.run.limit_test);
        fetch(r, "checkpoint_every", cfg.run.checkpoint_every);
        fetch(r, "metrics_every", cfg.run.metrics_every);
        fetch(r, "label_window", cfg.run.label_window);
        fetch(r, "top_percent", cfg.run.top_percent);
        fetch(r, "out_dir", cfg.run.out_dir);
        if (r.contains("voting")) {
            if (!r.at("voting").is_array())
                throw ConfigError("config: run.voting must be an array of scheme names");
            cfg.run.voting.clear();
            for (const auto& v : r.at("voting"))
                cfg.run.voting.push_back(voting_from_string(v.get<std::string>()));
        }
    }

    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace csnn
