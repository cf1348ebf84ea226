#include "csnn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace csnn {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t semantic_config_hash(const nlohmann::json& config) {
    nlohmann::json semantic = nlohmann::json::object();
    for (const char* key : {"seed", "architecture", "neurons", "plasticity", "encoder",
                            "schedule"})
        if (config.contains(key)) semantic[key] = config.at(key);
    return fnv1a64(semantic.dump());
}

namespace {

constexpr char magic[8] = {'C', 'S', 'N', 'N', 'C', 'K', 'P', 'T'};

size_t dtype_size(const std::string& dtype) {
    if (dtype == "f64" || dtype == "i64" || dtype == "u64") return 8;
    if (dtype == "i32" || dtype == "u32") return 4;
    if (dtype == "u8") return 1;
    throw DataError("checkpoint: unknown dtype " + dtype);
}

template <typename T>
void add_tensor(TensorArchive& a, std::string name, std::string dtype, std::span<const T> v,
                std::vector<uint64_t> shape) {
    if (shape.empty()) shape = {v.size()};
    TensorArchive::Entry e;
    e.name = std::move(name);
    e.dtype = std::move(dtype);
    e.shape = std::move(shape);
    e.bytes.resize(v.size_bytes());
    if (!v.empty()) std::memcpy(e.bytes.data(), v.data(), v.size_bytes());
    if (e.element_count() * sizeof(T) != e.bytes.size())
        throw std::invalid_argument("checkpoint: shape does not match data size for " + e.name);
    a.entries.push_back(std::move(e));
}

template <typename T>
std::vector<T> get_tensor(const TensorArchive& a, std::string_view name,
                          const std::string& dtype) {
    const auto& e = a.entry(name);
    if (e.dtype != dtype)
        throw DataError("checkpoint: tensor " + e.name + " has dtype " + e.dtype +
                        ", expected " + dtype);
    std::vector<T> out(e.bytes.size() / sizeof(T));
    if (!out.empty()) std::memcpy(out.data(), e.bytes.data(), e.bytes.size());
    return out;
}

void write_u32(std::ofstream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ofstream& out, uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

uint64_t TensorArchive::Entry::element_count() const {
    uint64_t n = 1;
    for (uint64_t d : shape) n *= d;
    return n;
}

bool TensorArchive::has(std::string_view name) const {
    for (const auto& e : entries)
        if (e.name == name) return true;
    return false;
}

const TensorArchive::Entry& TensorArchive::entry(std::string_view name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw DataError("checkpoint: missing tensor " + std::string(name));
}

void TensorArchive::add_f64(std::string name, std::span<const double> v,
                            std::vector<uint64_t> shape) {
    add_tensor(*this, std::move(name), "f64", v, std::move(shape));
}
void TensorArchive::add_i64(std::string name, std::span<const int64_t> v,
                            std::vector<uint64_t> shape) {
    add_tensor(*this, std::move(name), "i64", v, std::move(shape));
}
void TensorArchive::add_u64(std::string name, std::span<const uint64_t> v,
                            std::vector<uint64_t> shape) {
    add_tensor(*this, std::move(name), "u64", v, std::move(shape));
}
void TensorArchive::add_i32(std::string name, std::span<const int32_t> v,
                            std::vector<uint64_t> shape) {
    add_tensor(*this, std::move(name), "i32", v, std::move(shape));
}
void TensorArchive::add_u32(std::string name, std::span<const uint32_t> v,
                            std::vector<uint64_t> shape) {
    add_tensor(*this, std::move(name), "u32", v, std::move(shape));
}
void TensorArchive::add_u8(std::string name, std::span<const uint8_t> v,
                           std::vector<uint64_t> shape) {
    add_tensor(*this, std::move(name), "u8", v, std::move(shape));
}

std::vector<double> TensorArchive::f64(std::string_view name) const {
    return get_tensor<double>(*this, name, "f64");
}
std::vector<int64_t> TensorArchive::i64(std::string_view name) const {
    return get_tensor<int64_t>(*this, name, "i64");
}
std::vector<uint64_t> TensorArchive::u64(std::string_view name) const {
    return get_tensor<uint64_t>(*this, name, "u64");
}
std::vector<int32_t> TensorArchive::i32(std::string_view name) const {
    return get_tensor<int32_t>(*this, name, "i32");
}
std::vector<uint32_t> TensorArchive::u32(std::string_view name) const {
    return get_tensor<uint32_t>(*this, name, "u32");
}
std::vector<uint8_t> TensorArchive::u8(std::string_view name) const {
    return get_tensor<uint8_t>(*this, name, "u8");
}

void save_archive(const TensorArchive& a, const std::filesystem::path& path) {
    nlohmann::json manifest;
    manifest["meta"] = a.meta;
    nlohmann::json tensors = nlohmann::json::array();
    uint64_t offset = 0;
    for (const auto& e : a.entries) {
        tensors.push_back({{"name", e.name},
                           {"dtype", e.dtype},
                           {"shape", e.shape},
                           {"offset", offset},
                           {"nbytes", e.bytes.size()}});
        offset += e.bytes.size();
    }
    manifest["tensors"] = std::move(tensors);
    const std::string text = manifest.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("checkpoint: cannot write " + path.string());
    out.write(magic, sizeof magic);
    write_u32(out, checkpoint_version);
    write_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& e : a.entries)
        out.write(reinterpret_cast<const char*>(e.bytes.data()),
                  static_cast<std::streamsize>(e.bytes.size()));
    if (!out) throw DataError("checkpoint: write failed for " + path.string());
}

TensorArchive load_archive(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof(magic) + 12)
        throw DataError("checkpoint: truncated header in " + path.string());
    if (std::memcmp(bytes.data(), magic, sizeof magic) != 0)
        throw DataError("checkpoint: bad magic in " + path.string());
    uint32_t version = 0;
    std::memcpy(&version, bytes.data() + 8, 4);
    if (version != checkpoint_version)
        throw DataError("checkpoint: unsupported version " + std::to_string(version) + " in " +
                        path.string());
    uint64_t manifest_len = 0;
    std::memcpy(&manifest_len, bytes.data() + 12, 8);
    const size_t payload_start = sizeof(magic) + 12 + manifest_len;
    if (bytes.size() < payload_start)
        throw DataError("checkpoint: truncated manifest in " + path.string());

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(bytes.begin() + 20,
                                         bytes.begin() + static_cast<int64_t>(payload_start));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint: manifest corrupt in " + path.string() + ": " + e.what());
    }

    TensorArchive a;
    a.meta = manifest.value("meta", nlohmann::json::object());
    for (const auto& t : manifest.at("tensors")) {
        TensorArchive::Entry e;
        e.name = t.at("name").get<std::string>();
        e.dtype = t.at("dtype").get<std::string>();
        e.shape = t.at("shape").get<std::vector<uint64_t>>();
        const uint64_t offset = t.at("offset").get<uint64_t>();
        const uint64_t nbytes = t.at("nbytes").get<uint64_t>();
        if (payload_start + offset + nbytes > bytes.size())
            throw DataError("checkpoint: tensor " + e.name + " overruns file " + path.string());
        if (e.element_count() * dtype_size(e.dtype) != nbytes)
            throw DataError("checkpoint: tensor " + e.name + " shape/payload mismatch");
        const char* src = bytes.data() + payload_start + offset;
        e.bytes.resize(nbytes);
        if (nbytes) std::memcpy(e.bytes.data(), src, nbytes);
        a.entries.push_back(std::move(e));
    }

    if (a.meta.contains("config") && a.meta.contains("config_hash")) {
        const uint64_t stored = std::stoull(a.meta.at("config_hash").get<std::string>());
        const uint64_t actual = semantic_config_hash(a.meta.at("config"));
        if (stored != actual)
            throw DataError("checkpoint: config hash mismatch in " + path.string());
    }
    return a;
}

namespace {

void add_population(TensorArchive& a, const std::string& prefix, const LifState& s) {
    a.add_f64(prefix + ".v", s.v);
    a.add_f64(prefix + ".g_e", s.g_e);
    a.add_f64(prefix + ".g_i", s.g_i);
    a.add_f64(prefix + ".theta", s.theta);
    a.add_f64(prefix + ".refractory", s.refractory_left);
    a.add_i64(prefix + ".last_spike", s.last_spike_step);
}

void restore_population(const TensorArchive& a, const std::string& prefix, LifState& s) {
    auto expect = [&](size_t got) {
        if (got != s.size())
            throw DataError("checkpoint: population " + prefix + " size mismatch");
    };
    auto v = a.f64(prefix + ".v");
    expect(v.size());
    s.v = std::move(v);
    s.g_e = a.f64(prefix + ".g_e");
    s.g_i = a.f64(prefix + ".g_i");
    s.theta = a.f64(prefix + ".theta");
    s.refractory_left = a.f64(prefix + ".refractory");
    s.last_spike_step = a.i64(prefix + ".last_spike");
    expect(s.g_e.size());
    expect(s.g_i.size());
    expect(s.theta.size());
    expect(s.refractory_left.size());
    expect(s.last_spike_step.size());
}

}  // namespace

TensorArchive snapshot_state(const Simulator& sim, std::span<const SpikeRecord> log,
                             uint64_t next_ordinal) {
    const Network& net = sim.network();
    TensorArchive a;
    a.meta["step_index"] = sim.step_index();
    a.meta["next_ordinal"] = next_ordinal;
    a.meta["seed"] = std::to_string(sim.seed());

    add_population(a, "exc", net.exc);
    add_population(a, "inh", net.inh);

    for (const auto& g : net.projections) {
        a.add_f64("proj." + g.name + ".weights", g.weights);
        if (g.plastic) {
            a.add_f64("proj." + g.name + ".a_pre", g.a_pre);
            a.add_f64("proj." + g.name + ".a_post", g.a_post);
            a.add_i64("proj." + g.name + ".last_update", g.last_update);
        }
    }

    a.add_u8("mask.input", sim.input_prev());
    a.add_u8("mask.exc", sim.exc_prev());
    a.add_u8("mask.inh", sim.inh_prev());

    const OpCounters& c = sim.counters();
    const std::vector<uint64_t> counters = {c.steps,
                                            c.accounted,
                                            c.executed_conductance_decays,
                                            c.executed_injections,
                                            c.executed_trace_updates,
                                            c.executed_weight_updates,
                                            c.executed_voltage_updates,
                                            c.input_spikes,
                                            c.exc_spikes};
    a.add_u64("counters", counters);

    const size_t n = log.size();
    const uint32_t m = net.n_exc();
    const uint32_t patches = net.spec.n_patches();
    std::vector<uint64_t> ordinals(n), input_spikes(n);
    std::vector<int32_t> labels(n);
    std::vector<uint32_t> escalations(n), counts(n * m), argmax(n * patches);
    for (size_t i = 0; i < n; ++i) {
        const SpikeRecord& r = log[i];
        ordinals[i] = r.ordinal;
        input_spikes[i] = r.input_spikes;
        labels[i] = r.label;
        escalations[i] = r.escalations;
        std::copy(r.exc_counts.begin(), r.exc_counts.end(), counts.begin() + i * m);
        std::copy(r.patch_argmax.begin(), r.patch_argmax.end(), argmax.begin() + i * patches);
    }
    a.add_u64("log.ordinals", ordinals);
    a.add_u64("log.input_spikes", input_spikes);
    a.add_i32("log.labels", labels);
    a.add_u32("log.escalations", escalations);
    a.add_u32("log.exc_counts", counts, {n, m});
    a.add_u32("log.patch_argmax", argmax, {n, patches});
    return a;
}

RestoredState restore_state(Simulator& sim, const TensorArchive& a) {
    Network& net = sim.network();
    restore_population(a, "exc", net.exc);
    restore_population(a, "inh", net.inh);

    for (auto& g : net.projections) {
        auto w = a.f64("proj." + g.name + ".weights");
        if (w.size() != g.weights.size())
            throw DataError("checkpoint: projection " + g.name + " weight count mismatch");
        g.weights = std::move(w);
        if (g.plastic) {
            g.a_pre = a.f64("proj." + g.name + ".a_pre");
            g.a_post = a.f64("proj." + g.name + ".a_post");
            g.last_update = a.i64("proj." + g.name + ".last_update");
            if (g.a_pre.size() != g.connection_count() ||
                g.a_post.size() != g.connection_count() ||
                g.last_update.size() != g.connection_count())
                throw DataError("checkpoint: projection " + g.name + " trace count mismatch");
        }
    }

    sim.input_prev() = a.u8("mask.input");
    sim.exc_prev() = a.u8("mask.exc");
    sim.inh_prev() = a.u8("mask.inh");
    if (sim.input_prev().size() != net.n_input() || sim.exc_prev().size() != net.n_exc() ||
        sim.inh_prev().size() != net.n_inh())
        throw DataError("checkpoint: spike mask size mismatch");

    const auto counters = a.u64("counters");
    if (counters.size() != 9) throw DataError("checkpoint: counter block size mismatch");
    OpCounters c;
    c.steps = counters[0];
    c.accounted = counters[1];
    c.executed_conductance_decays = counters[2];
    c.executed_injections = counters[3];
    c.executed_trace_updates = counters[4];
    c.executed_weight_updates = counters[5];
    c.executed_voltage_updates = counters[6];
    c.input_spikes = counters[7];
    c.exc_spikes = counters[8];
    sim.set_counters(c);
    sim.set_step_index(a.meta.at("step_index").get<int64_t>());

    RestoredState out;
    out.next_ordinal = a.meta.at("next_ordinal").get<uint64_t>();

    const auto ordinals = a.u64("log.ordinals");
    const auto input_spikes = a.u64("log.input_spikes");
    const auto labels = a.i32("log.labels");
    const auto escalations = a.u32("log.escalations");
    const auto counts = a.u32("log.exc_counts");
    const auto argmax = a.u32("log.patch_argmax");
    const size_t n = ordinals.size();
    const uint32_t m = net.n_exc();
    const uint32_t patches = net.spec.n_patches();
    if (labels.size() != n || escalations.size() != n || input_spikes.size() != n ||
        counts.size() != n * m || argmax.size() != n * patches)
        throw DataError("checkpoint: spike log block size mismatch");
    out.log.resize(n);
    for (size_t i = 0; i < n; ++i) {
        SpikeRecord& r = out.log[i];
        r.ordinal = ordinals[i];
        r.input_spikes = input_spikes[i];
        r.label = labels[i];
        r.escalations = escalations[i];
        r.exc_counts.assign(counts.begin() + i * m, counts.begin() + (i + 1) * m);
        r.patch_argmax.assign(argmax.begin() + i * patches, argmax.begin() + (i + 1) * patches);
    }
    return out;
}

}  // namespace csnn
