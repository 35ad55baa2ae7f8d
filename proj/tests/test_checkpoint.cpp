// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rfbsr/checkpoint.hpp"

using namespace rfbsr;
namespace fs = std::filesystem;

namespace {

GeneratorConfig micro_config() {
    GeneratorConfig cfg;
    cfg.n_rrdb = 1;
    cfg.n_rrfdb = 1;
    cfg.rfb_per_rrfdb = 2;
    cfg.base_channels = 8;
    cfg.growth = 4;
    cfg.scale = 2;
    cfg.upsample_plan = {{UpsampleKind::nni, true}};
    return cfg;
}

fs::path fresh_dir() {
    const fs::path dir = fs::temp_directory_path() / "rfbsr_test_ckpt";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), {});
}

}  // namespace

TEST_CASE("save then load reproduces every tensor bitwise, with metadata") {
    const fs::path dir = fresh_dir();
    GeneratorConfig cfg = micro_config();
    Generator<float> gen(cfg, 17);
    CheckpointMeta meta;
    meta.step = 4200;
    meta.stage = 1;
    meta.seed = 17;
    auto params = gen.parameters();
    save_checkpoint<float>(params, fingerprint_of(cfg), meta, dir / "g.ckpt");

    Generator<float> other(cfg, 99);  // different init, same architecture
    auto other_params = other.parameters();
    load_checkpoint<float>(dir / "g.ckpt", other_params, fingerprint_of(cfg));
    for (size_t i = 0; i < params.size(); ++i)
        CHECK(oracles::bitwise_equal(params[i]->value, other_params[i]->value));

    const CheckpointData data = load_checkpoint_file(dir / "g.ckpt");
    CHECK(data.meta.step == 4200);
    CHECK(data.meta.stage == 1);
    CHECK(data.meta.seed == 17);
    CHECK(data.version == kCheckpointVersion);
}

TEST_CASE("two saves of one network are byte-identical") {
    const fs::path dir = fresh_dir();
    Generator<float> gen(micro_config(), 3);
    CheckpointMeta meta;
    meta.step = 5;
    auto params = gen.parameters();
    save_checkpoint<float>(params, fingerprint_of(micro_config()), meta, dir / "a.ckpt");
    save_checkpoint<float>(params, fingerprint_of(micro_config()), meta, dir / "b.ckpt");
    CHECK(file_bytes(dir / "a.ckpt") == file_bytes(dir / "b.ckpt"));
    CHECK(!file_bytes(dir / "a.ckpt").empty());
}

TEST_CASE("file layout starts with the magic and survives sorted-name order") {
    const fs::path dir = fresh_dir();
    Parameter<float> b("zeta", Tensor<float>::scalar_of(2.0f));
    Parameter<float> a("alpha", Tensor<float>::scalar_of(1.0f));
    std::vector<Parameter<float>*> params{&b, &a};  // registration order reversed
    save_checkpoint<float>(params, Fingerprint{}, CheckpointMeta{}, dir / "s.ckpt");
    const std::string bytes = file_bytes(dir / "s.ckpt");
    CHECK(bytes.substr(0, 6) == std::string("RFBSR\0", 6));
    CHECK(bytes.find("alpha") < bytes.find("zeta"));  // entries sorted by name
}

TEST_CASE("truncation and corruption are detected; nothing is applied") {
    const fs::path dir = fresh_dir();
    Generator<float> gen(micro_config(), 4);
    auto params = gen.parameters();
    save_checkpoint<float>(params, fingerprint_of(micro_config()), CheckpointMeta{}, dir / "g.ckpt");

    std::string bytes = file_bytes(dir / "g.ckpt");
    {
        std::ofstream os(dir / "trunc.ckpt", std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 17));
    }
    {
        std::string corrupt = bytes;
        corrupt[100] = static_cast<char>(corrupt[100] ^ 0x5a);
        std::ofstream os(dir / "corrupt.ckpt", std::ios::binary);
        os.write(corrupt.data(), static_cast<std::streamsize>(corrupt.size()));
    }

    Generator<float> target(micro_config(), 5);
    const auto before = [&] {
        std::vector<Tensor<float>> s;
        for (auto* p : target.parameters()) s.push_back(p->value);
        return s;
    }();
    auto target_params = target.parameters();
    CHECK_THROWS_AS(load_checkpoint<float>(dir / "trunc.ckpt", target_params, std::nullopt),
                    CheckpointError);
    CHECK_THROWS_AS(load_checkpoint<float>(dir / "corrupt.ckpt", target_params, std::nullopt),
                    CheckpointError);
    auto after = target.parameters();
    for (size_t i = 0; i < after.size(); ++i) CHECK(oracles::bitwise_equal(before[i], after[i]->value));
}

TEST_CASE("architecture mismatch errors name the first offending parameter") {
    const fs::path dir = fresh_dir();
    GeneratorConfig small = micro_config();
    Generator<float> gen(small, 6);
    auto params = gen.parameters();
    save_checkpoint<float>(params, fingerprint_of(small), CheckpointMeta{}, dir / "g.ckpt");

    GeneratorConfig wide = micro_config();
    wide.base_channels = 12;
    wide.growth = 8;
    Generator<float> target(wide, 7);
    auto target_params = target.parameters();

    // fingerprint catches it first
    CHECK_THROWS_AS(load_checkpoint<float>(dir / "g.ckpt", target_params, fingerprint_of(wide)),
                    CheckpointError);
    // without a fingerprint the first shape mismatch (in name order) is named
    try {
        load_checkpoint<float>(dir / "g.ckpt", target_params, std::nullopt);
        FAIL("expected CheckpointError");
    } catch (const CheckpointError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("final_conv1.bias") != std::string::npos);
        CHECK(msg.find("shape mismatch") != std::string::npos);
    }

    // force: the shape-compatible intersection loads, the rest is reported
    const auto skipped = load_checkpoint<float>(dir / "g.ckpt", target_params, fingerprint_of(wide), true);
    CHECK(!skipped.empty());
}

TEST_CASE("fingerprints separate architectures and ignore metadata") {
    GeneratorConfig a = micro_config();
    GeneratorConfig b = micro_config();
    CHECK(fingerprint_of(a) == fingerprint_of(b));
    b.n_rrfdb = 2;
    CHECK(fingerprint_of(a) != fingerprint_of(b));
    GeneratorConfig c = micro_config();
    c.upsample_plan = {{UpsampleKind::spc, true}};
    CHECK(fingerprint_of(a) != fingerprint_of(c));
    CHECK(fingerprint_hex(fingerprint_of(a)).size() == 64);
}

TEST_CASE("sha256 known answers") {
    // FIPS 180-4 test vectors
    CHECK(fingerprint_hex(sha256("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(fingerprint_hex(sha256("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(fingerprint_hex(sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}
