#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "csnn/engine.hpp"
#include "csnn/errors.hpp"

namespace csnn {

inline constexpr uint32_t checkpoint_version = 1;

uint64_t fnv1a64(std::string_view s);

// Hash over the simulation-defining part of a config JSON (seed,
// architecture, neurons, plasticity, encoder and schedule). Run-control
// fields such as limits and output paths do not participate, so resuming
// into a different output directory stays legal.
uint64_t semantic_config_hash(const nlohmann::json& config);

// Named typed tensors plus a JSON meta block. Saved as a fixed binary
// header, a canonical JSON manifest and raw little-endian payloads, so a
// save/load/save cycle is byte-identical.
struct TensorArchive {
    struct Entry {
        std::string name;
        std::string dtype;  // f64, i64, u64, i32, u32, u8
        std::vector<uint64_t> shape;
        std::vector<std::byte> bytes;

        uint64_t element_count() const;
    };

    nlohmann::json meta = nlohmann::json::object();
    std::vector<Entry> entries;

    bool has(std::string_view name) const;
    const Entry& entry(std::string_view name) const;

    void add_f64(std::string name, std::span<const double> v, std::vector<uint64_t> shape = {});
    void add_i64(std::string name, std::span<const int64_t> v, std::vector<uint64_t> shape = {});
    void add_u64(std::string name, std::span<const uint64_t> v, std::vector<uint64_t> shape = {});
    void add_i32(std::string name, std::span<const int32_t> v, std::vector<uint64_t> shape = {});
    void add_u32(std::string name, std::span<const uint32_t> v, std::vector<uint64_t> shape = {});
    void add_u8(std::string name, std::span<const uint8_t> v, std::vector<uint64_t> shape = {});

    std::vector<double> f64(std::string_view name) const;
    std::vector<int64_t> i64(std::string_view name) const;
    std::vector<uint64_t> u64(std::string_view name) const;
    std::vector<int32_t> i32(std::string_view name) const;
    std::vector<uint32_t> u32(std::string_view name) const;
    std::vector<uint8_t> u8(std::string_view name) const;
};

void save_archive(const TensorArchive& a, const std::filesystem::path& path);

// DataError on bad magic, unsupported version, manifest corruption, payload
// size mismatch, or a meta config hash that does not match the embedded
// config.
TensorArchive load_archive(const std::filesystem::path& path);

// Full simulator snapshot: population state, projection weights and traces,
// in-flight spike masks, work counters, the spike log and any fitted labels,
// so a restored run continues bit-exactly. meta gains step_index,
// next_ordinal and seed; the caller adds its config block before saving.
TensorArchive snapshot_state(const Simulator& sim, std::span<const SpikeRecord> log,
                             uint64_t next_ordinal);

struct RestoredState {
    uint64_t next_ordinal = 0;
    std::vector<SpikeRecord> log;
};

// Overwrites the state of a simulator freshly built from the same config.
RestoredState restore_state(Simulator& sim, const TensorArchive& a);

}  // namespace csnn
