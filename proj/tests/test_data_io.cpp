#include "doctest.h"

#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "csnn/checkpoint.hpp"
#include "csnn/idx.hpp"
#include "csnn/metrics.hpp"
#include "csnn/pgm.hpp"
#include "oracles.hpp"

using namespace csnn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& f) const { return path / f; }
};

void push_be32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(static_cast<uint8_t>(x >> 24));
    v.push_back(static_cast<uint8_t>(x >> 16));
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x));
}

void write_bytes(const fs::path& p, const std::vector<uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
}

std::vector<uint8_t> image_fixture(uint32_t count, uint32_t rows, uint32_t cols,
                                   const std::vector<uint8_t>& pixels, uint32_t magic = 0x803) {
    std::vector<uint8_t> v;
    push_be32(v, magic);
    push_be32(v, count);
    push_be32(v, rows);
    push_be32(v, cols);
    v.insert(v.end(), pixels.begin(), pixels.end());
    return v;
}

std::vector<uint8_t> label_fixture(const std::vector<uint8_t>& labels, uint32_t magic = 0x801) {
    std::vector<uint8_t> v;
    push_be32(v, magic);
    push_be32(v, static_cast<uint32_t>(labels.size()));
    v.insert(v.end(), labels.begin(), labels.end());
    return v;
}

}  // namespace

TEST_SUITE("data_io") {

TEST_CASE("idx fixtures load byte-exactly with big-endian headers") {
    TempDir dir("csnn_idx_test");
    const std::vector<uint8_t> px = {0, 10, 20, 30, 40, 50, 255, 254, 253, 252, 251, 250};
    write_bytes(dir / "img", image_fixture(2, 2, 3, px));
    write_bytes(dir / "lbl", label_fixture({3, 9}));

    const IdxImages imgs = load_idx_images(dir / "img");
    CHECK(imgs.count == 2);
    CHECK(imgs.rows == 2);
    CHECK(imgs.cols == 3);
    REQUIRE(imgs.pixels.size() == 12);
    CHECK(imgs.pixels == px);
    CHECK(imgs.image(1)[0] == 255);

    const Dataset ds = load_dataset(dir / "img", dir / "lbl");
    CHECK(ds.size() == 2);
    CHECK(ds.all_labels() == std::vector<int32_t>{3, 9});
    const std::vector<double> in0 = ds.image_intensities(0);
    REQUIRE(in0.size() == 6);
    for (size_t i = 0; i < 6; ++i) CHECK(in0[i] == static_cast<double>(px[i]) / 255.0);
}

TEST_CASE("idx loading rejects malformed files by cause") {
    TempDir dir("csnn_idx_errors");
    auto expect_throw = [](const fs::path& p, const char* what, bool images) {
        try {
            if (images)
                load_idx_images(p);
            else
                load_idx_labels(p);
            const std::string msg = std::string("expected DataError for ") + what;
            FAIL_CHECK(msg);
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(what) != std::string::npos);
        }
    };

    expect_throw(dir / "missing", "cannot open", true);

    write_bytes(dir / "short", {0, 0, 8, 3, 0, 0});
    expect_throw(dir / "short", "truncated image header", true);

    write_bytes(dir / "magic", image_fixture(1, 1, 1, {7}, 0x801));
    expect_throw(dir / "magic", "bad image magic", true);

    write_bytes(dir / "payload", image_fixture(2, 2, 3, std::vector<uint8_t>(11, 0)));
    expect_throw(dir / "payload", "image payload size mismatch", true);

    write_bytes(dir / "lmagic", label_fixture({1}, 0x803));
    expect_throw(dir / "lmagic", "bad label magic", false);

    write_bytes(dir / "img", image_fixture(2, 1, 1, {1, 2}));
    write_bytes(dir / "lbl3", label_fixture({0, 1, 2}));
    CHECK_THROWS_AS(load_dataset(dir / "img", dir / "lbl3"), DataError);

    write_bytes(dir / "lbl_hi", label_fixture({0, 10}));
    CHECK_THROWS_AS(load_dataset(dir / "img", dir / "lbl_hi"), DataError);
}

TEST_CASE("tensor archives round-trip bit-exactly, including nan and inf") {
    TempDir dir("csnn_archive_test");
    TensorArchive a;
    a.meta = {{"alpha", 1}, {"nested", {{"b", "text"}}}};
    const std::vector<double> f = {0.0,
                                   -0.0,
                                   std::nan(""),
                                   std::numeric_limits<double>::infinity(),
                                   -std::numeric_limits<double>::infinity(),
                                   1.0 / 3.0};
    a.add_f64("f", f, {2, 3});
    const std::vector<uint8_t> u8v = {1, 2, 3};
    a.add_u8("u8", u8v);
    const std::vector<int32_t> i32v = {-5, 6};
    a.add_i32("i32", i32v);
    const std::vector<uint64_t> u64v = {0xffffffffffffffffull, 1};
    a.add_u64("u64", u64v);
    const std::vector<int64_t> i64v = {-1};
    a.add_i64("i64", i64v);
    const std::vector<uint32_t> u32v = {7};
    a.add_u32("u32", u32v);

    save_archive(a, dir / "a.bin");
    const TensorArchive b = load_archive(dir / "a.bin");
    CHECK(b.meta == a.meta);
    REQUIRE(b.entries.size() == a.entries.size());
    for (size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(b.entries[i].name == a.entries[i].name);
        CHECK(b.entries[i].dtype == a.entries[i].dtype);
        CHECK(b.entries[i].shape == a.entries[i].shape);
        REQUIRE(b.entries[i].bytes.size() == a.entries[i].bytes.size());
        CHECK(std::memcmp(b.entries[i].bytes.data(), a.entries[i].bytes.data(),
                          a.entries[i].bytes.size()) == 0);
    }
    CHECK(b.entry("f").shape == std::vector<uint64_t>{2, 3});
    CHECK(std::isnan(b.f64("f")[2]));
    CHECK(b.u8("u8") == u8v);
    CHECK(b.i32("i32") == i32v);
    CHECK(b.u64("u64") == u64v);

    // a second save of the loaded archive is byte-identical
    save_archive(b, dir / "b.bin");
    CHECK(read_bytes(dir / "a.bin") == read_bytes(dir / "b.bin"));

    CHECK_THROWS_AS(b.entry("nope"), DataError);
    CHECK_THROWS_AS(b.f64("u8"), DataError);   // dtype mismatch
    TensorArchive bad;
    const std::vector<double> two = {1.0, 2.0};
    CHECK_THROWS_AS(bad.add_f64("x", two, {3}), std::invalid_argument);
}

TEST_CASE("corrupted archives are rejected by cause") {
    TempDir dir("csnn_corrupt_test");
    TensorArchive a;
    const std::vector<double> payload = {1.5, 2.5};
    a.add_f64("x", payload);
    save_archive(a, dir / "good.bin");
    const std::vector<uint8_t> good = read_bytes(dir / "good.bin");

    auto expect = [&](std::vector<uint8_t> bytes, const char* what) {
        write_bytes(dir / "bad.bin", bytes);
        try {
            load_archive(dir / "bad.bin");
            const std::string msg = std::string("expected DataError containing: ") + what;
            FAIL_CHECK(msg);
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(what) != std::string::npos);
        }
    };

    std::vector<uint8_t> bad = good;
    bad[0] ^= 0xff;
    expect(bad, "bad magic");

    bad = good;
    bad[8] += 1;
    expect(bad, "unsupported version");

    expect(std::vector<uint8_t>(good.begin(), good.begin() + 10), "truncated header");
    expect(std::vector<uint8_t>(good.begin(), good.begin() + 25), "truncated manifest");

    bad = good;
    bad[20] = 'X';  // first manifest byte; no longer valid JSON
    expect(bad, "manifest corrupt");

    expect(std::vector<uint8_t>(good.begin(), good.end() - 1), "overruns");
}

TEST_CASE("the semantic hash ignores run-control fields but not physics") {
    nlohmann::json cfg = {{"seed", 1},
                          {"architecture", {{"kind", "baseline"}}},
                          {"neurons", {{"tau", 100.0}}},
                          {"run", {{"out_dir", "a"}, {"limit_train", 100}}}};
    nlohmann::json other_dir = cfg;
    other_dir["run"]["out_dir"] = "b";
    CHECK(semantic_config_hash(cfg) == semantic_config_hash(other_dir));

    nlohmann::json other_seed = cfg;
    other_seed["seed"] = 2;
    CHECK(semantic_config_hash(cfg) != semantic_config_hash(other_seed));
    nlohmann::json other_tau = cfg;
    other_tau["neurons"]["tau"] = 90.0;
    CHECK(semantic_config_hash(cfg) != semantic_config_hash(other_tau));
}

TEST_CASE("a config hash that contradicts the embedded config is rejected") {
    TempDir dir("csnn_hash_test");
    TensorArchive a;
    const std::vector<double> x = {1.0};
    a.add_f64("x", x);
    a.meta["config"] = {{"seed", 5}};
    a.meta["config_hash"] = std::to_string(semantic_config_hash(a.meta["config"]));
    save_archive(a, dir / "ok.bin");
    CHECK_NOTHROW(load_archive(dir / "ok.bin"));

    a.meta["config_hash"] = "12345";
    save_archive(a, dir / "bad.bin");
    CHECK_THROWS_AS(load_archive(dir / "bad.bin"), DataError);
}

TEST_CASE("a snapshot restores a simulator to a bit-identical continuation") {
    TempDir dir("csnn_snapshot_test");
    std::vector<std::vector<double>> images;
    oracle::CaseRng gen(8);
    for (int k = 0; k < 5; ++k) {
        std::vector<double> img(16);
        for (double& x : img) x = gen.uniform(0.0, 1.0);
        images.push_back(std::move(img));
    }
    const std::vector<int32_t> labels = {0, 1, 2, 3, 4};

    Schedule sched;
    sched.present_ms = 25.0;
    sched.rest_ms = 10.0;
    EncoderConfig enc;
    enc.escalation_enabled = false;
    auto fresh = [&](uint64_t seed) {
        return Simulator(instantiate_network(build_baseline(16, 4, 22.5, 17.0), LifParams{},
                                             LifParams::inhibitory_defaults(),
                                             PlasticityParams{}, sched.dt, seed),
                         sched, enc, seed);
    };

    Simulator a = fresh(33);
    std::vector<SpikeRecord> log_a;
    train(a, images, labels, 0, 3, log_a);
    save_archive(snapshot_state(a, log_a, 3), dir / "state.bin");

    Simulator b = fresh(33);
    // desynchronize b so the restore has to overwrite real state
    std::vector<SpikeRecord> scratch;
    train(b, images, labels, 0, 1, scratch);
    const RestoredState restored = restore_state(b, load_archive(dir / "state.bin"));
    CHECK(restored.next_ordinal == 3);
    REQUIRE(restored.log.size() == log_a.size());
    for (size_t i = 0; i < log_a.size(); ++i) {
        CHECK(restored.log[i].ordinal == log_a[i].ordinal);
        CHECK(restored.log[i].label == log_a[i].label);
        CHECK(restored.log[i].input_spikes == log_a[i].input_spikes);
        CHECK(restored.log[i].escalations == log_a[i].escalations);
        CHECK(restored.log[i].exc_counts == log_a[i].exc_counts);
        CHECK(restored.log[i].patch_argmax == log_a[i].patch_argmax);
    }
    CHECK(b.step_index() == a.step_index());
    CHECK(b.counters().steps == a.counters().steps);
    CHECK(b.counters().accounted == a.counters().accounted);
    CHECK(b.network().exc.v == a.network().exc.v);
    CHECK(b.network().exc.theta == a.network().exc.theta);
    CHECK(b.network().inh.v == a.network().inh.v);
    CHECK(b.input_prev() == a.input_prev());
    for (size_t pi = 0; pi < a.network().projections.size(); ++pi) {
        CHECK(b.network().projections[pi].weights == a.network().projections[pi].weights);
        CHECK(b.network().projections[pi].a_pre == a.network().projections[pi].a_pre);
        CHECK(b.network().projections[pi].last_update == a.network().projections[pi].last_update);
    }

    // both continuations stay in lockstep
    std::vector<SpikeRecord> log_b = restored.log;
    train(a, images, labels, 3, 2, log_a);
    train(b, images, labels, 3, 2, log_b);
    CHECK(a.network().projections[0].weights == b.network().projections[0].weights);
    CHECK(a.network().exc.v == b.network().exc.v);
    CHECK(log_a.back().exc_counts == log_b.back().exc_counts);
}

TEST_CASE("pgm files carry the exact header and payload") {
    TempDir dir("csnn_pgm_test");
    const std::vector<uint8_t> px = {0, 64, 128, 255};
    write_pgm(dir / "t.pgm", 2, 2, px);
    const std::vector<uint8_t> bytes = read_bytes(dir / "t.pgm");
    const std::string header = "P5\n2 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 4);
    CHECK(std::memcmp(bytes.data(), header.data(), header.size()) == 0);
    CHECK(std::memcmp(bytes.data() + header.size(), px.data(), 4) == 0);

    const GrayImage img = read_pgm(dir / "t.pgm");
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.pixels == px);

    CHECK_THROWS_AS(write_pgm(dir / "bad.pgm", 3, 2, px), std::invalid_argument);
    write_bytes(dir / "trunc.pgm", std::vector<uint8_t>(bytes.begin(), bytes.end() - 2));
    CHECK_THROWS_AS(read_pgm(dir / "trunc.pgm"), DataError);
}

TEST_CASE("tile grids pad and leave missing tiles as background") {
    const std::vector<std::vector<uint8_t>> tiles = {{10, 20, 30, 40}, {50, 60, 70, 80}};
    const GrayImage img = render_tile_grid(tiles, 1, 3, 2, 2, 1);
    CHECK(img.width == 10);   // 3 * (2 + 1) + 1
    CHECK(img.height == 4);   // 1 * (2 + 1) + 1
    CHECK(img.pixels[1 * 10 + 1] == 10);
    CHECK(img.pixels[1 * 10 + 2] == 20);
    CHECK(img.pixels[2 * 10 + 1] == 30);
    CHECK(img.pixels[2 * 10 + 2] == 40);
    CHECK(img.pixels[1 * 10 + 4] == 50);
    CHECK(img.pixels[2 * 10 + 5] == 80);
    CHECK(img.pixels[1 * 10 + 7] == 0);  // missing third tile
    CHECK(img.pixels[2 * 10 + 8] == 0);
    CHECK(img.pixels[0] == 0);           // border padding

    CHECK_THROWS_AS(render_tile_grid(tiles, 1, 1, 2, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(render_tile_grid({{1, 2, 3}}, 1, 1, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("weights map linearly onto 8-bit gray") {
    const std::vector<double> w = {2.0, 1.0, 0.0, 2.5, -0.5};
    const std::vector<uint8_t> g = weights_to_gray(w, 2.0);
    CHECK(g == std::vector<uint8_t>{255, 128, 0, 255, 0});
    CHECK_THROWS_AS(weights_to_gray(w, 0.0), std::invalid_argument);
}

TEST_CASE("filter grids lay out one tile per neuron or per patch kernel") {
    Network base = instantiate_network(build_baseline(4, 3, 22.5, 17.0), LifParams{},
                                       LifParams::inhibitory_defaults(), PlasticityParams{},
                                       0.5, 1);
    // overwrite so each neuron's tile is a uniform, known gray
    SynapseGroup& ff = base.projections[0];
    for (size_t c = 0; c < ff.connection_count(); ++c)
        ff.weights[ff.weight_slot[c]] = 0.25 * ff.post_of[c];
    const GrayImage img = filter_grid(base, 1);
    CHECK(img.width == 7);   // ceil(sqrt(3)) = 2 columns of 2x2 tiles
    CHECK(img.height == 7);
    CHECK(img.pixels[1 * 7 + 1] == 0);                       // neuron 0: w = 0
    CHECK(img.pixels[1 * 7 + 4] == 64);                      // neuron 1: w = 0.25
    CHECK(img.pixels[4 * 7 + 1] == 128);                     // neuron 2: w = 0.5
    CHECK(img.pixels[4 * 7 + 4] == 0);                       // missing fourth tile

    ConvTopology conv;
    conv.kernel = 14;
    conv.stride = 14;
    conv.n_patches = 2;
    Network cnet = instantiate_network(build_csnn(conv, 22.5, 17.0), LifParams{},
                                       LifParams::inhibitory_defaults(), PlasticityParams{},
                                       0.5, 1);
    const GrayImage cimg = filter_grid(cnet, 1);
    CHECK(cimg.width == 4 * 15 + 1);   // 4 locations per row
    CHECK(cimg.height == 2 * 15 + 1);  // one row per patch

    conv.shared_weights = true;
    Network snet = instantiate_network(build_csnn(conv, 22.5, 17.0), LifParams{},
                                       LifParams::inhibitory_defaults(), PlasticityParams{},
                                       0.5, 1);
    const GrayImage simg = filter_grid(snet, 1);
    CHECK(simg.width == 2 * 15 + 1);   // one kernel per patch
    CHECK(simg.height == 15 + 1);
}

TEST_CASE("metrics rows survive a write/read cycle at full precision") {
    TempDir dir("csnn_metrics_test");
    {
        MetricsWriter w(dir / "m.csv");
        MetricsRow r1{250, std::nan(""), 4e-3, 2.75e-4, 1.0 / 3.0, 26.5};
        MetricsRow r2{500, 0.8125, 0.004100000000000001, 3e-4, 0.17, 30.0};
        w.append(r1);
        w.append(r2);
    }
    const std::vector<MetricsRow> rows = read_metrics(dir / "m.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].iteration == 250);
    CHECK(std::isnan(rows[0].estimated_accuracy));
    CHECK(rows[0].r_x == 4e-3);
    CHECK(rows[0].r_e == 2.75e-4);
    CHECK(rows[0].mean_weight == 1.0 / 3.0);
    CHECK(rows[1].iteration == 500);
    CHECK(rows[1].estimated_accuracy == 0.8125);
    CHECK(rows[1].r_x == 0.004100000000000001);

    std::ofstream bad(dir / "bad.csv");
    bad << "iteration,acc\n1,2\n";
    bad.close();
    CHECK_THROWS_AS(read_metrics(dir / "bad.csv"), DataError);
    std::ofstream shortrow(dir / "short.csv");
    shortrow << MetricsWriter::header() << "\n" << "250,0.5\n";
    shortrow.close();
    CHECK_THROWS_AS(read_metrics(dir / "short.csv"), DataError);
    CHECK_THROWS_AS(read_metrics(dir / "missing.csv"), DataError);
}

}  // TEST_SUITE
