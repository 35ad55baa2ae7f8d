// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "rfbsr/ensemble.hpp"
#include "synthetic.hpp"

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
    cfg.upsample_plan = {{UpsampleKind::spc, true}};
    return cfg;
}

struct CheckpointFixture {
    fs::path dir;
    GeneratorConfig cfg = micro_config();
    Fingerprint fp = fingerprint_of(cfg);

    CheckpointFixture() {
        dir = fs::temp_directory_path() / "rfbsr_test_ensemble";
        fs::remove_all(dir);
        fs::create_directories(dir);
    }

    /// Writes a checkpoint of the micro generator with values offset by
    /// `delta` and records `step` in the metadata.
    fs::path write(const std::string& name, uint64_t seed, float delta, uint64_t step) {
        Generator<float> gen(cfg, seed);
        for (auto* p : gen.parameters())
            for (auto& v : p->value.data) v += delta;
        CheckpointMeta meta;
        meta.step = step;
        meta.stage = 1;
        meta.seed = seed;
        const fs::path path = dir / name;
        auto params = gen.parameters();
        save_checkpoint<float>(params, fp, meta, path);
        return path;
    }
};

}  // namespace

TEST_CASE("mean of identical checkpoints is bit-identical to the input") {
    CheckpointFixture fx;
    const fs::path a = fx.write("a.ckpt", 1, 0.0f, 100);
    const fs::path b = fx.write("b.ckpt", 1, 0.0f, 200);
    const fs::path c = fx.write("c.ckpt", 1, 0.0f, 300);
    const CheckpointData avg = average_checkpoints({a, b, c}, 3);
    const CheckpointData ref = load_checkpoint_file(a);
    for (const auto& [name, t] : ref.tensors) {
        const auto& got = avg.tensors.at(name);
        CHECK(got.f32 == t.f32);
    }
    CHECK(avg.meta.stage == 2);
    CHECK(avg.meta.source_steps == std::vector<uint64_t>{100, 200, 300});
}

TEST_CASE("two-checkpoint midpoint and linearity") {
    CheckpointFixture fx;
    const fs::path a = fx.write("a.ckpt", 2, 0.0f, 10);
    const fs::path b = fx.write("b.ckpt", 2, 1.0f, 20);  // theta + 1
    const CheckpointData avg = average_checkpoints({a, b}, 2);
    const CheckpointData base = load_checkpoint_file(a);
    for (const auto& [name, t] : base.tensors) {
        const auto& got = avg.tensors.at(name);
        for (size_t i = 0; i < t.f32.size(); ++i)
            CHECK(got.f32[i] == doctest::Approx(t.f32[i] + 0.5f).epsilon(1e-6));
    }
}

TEST_CASE("three-way average matches the elementwise oracle and ignores order") {
    CheckpointFixture fx;
    const fs::path a = fx.write("a.ckpt", 3, 0.0f, 1);
    const fs::path b = fx.write("b.ckpt", 4, 0.25f, 2);
    const fs::path c = fx.write("c.ckpt", 5, -0.5f, 3);

    const CheckpointData avg = average_checkpoints({a, b, c}, 3);
    const CheckpointData da = load_checkpoint_file(a), db = load_checkpoint_file(b),
                         dc = load_checkpoint_file(c);
    for (const auto& [name, ta] : da.tensors) {
        const auto& tb = db.tensors.at(name);
        const auto& tc = dc.tensors.at(name);
        const auto& got = avg.tensors.at(name);
        for (size_t i = 0; i < ta.f32.size(); ++i) {
            const double want = (static_cast<double>(ta.f32[i]) + tb.f32[i] + tc.f32[i]) / 3.0;
            CHECK(std::abs(static_cast<double>(got.f32[i]) - want) <=
                  std::abs(want) * 1e-7 + 1e-12);  // one f32 rounding of the 64-bit mean
        }
    }

    // permutation invariance is exact, not approximate
    const CheckpointData perm = average_checkpoints({c, a, b}, 3);
    for (const auto& [name, t] : avg.tensors) CHECK(perm.tensors.at(name).f32 == t.f32);
}

TEST_CASE("averaging the average with itself is idempotent") {
    CheckpointFixture fx;
    const fs::path a = fx.write("a.ckpt", 6, 0.0f, 1);
    const fs::path b = fx.write("b.ckpt", 7, 0.5f, 2);
    CheckpointData avg = average_checkpoints({a, b}, 2);
    const fs::path avg_path = fx.dir / "avg.ckpt";
    save_checkpoint_data(avg, avg_path);
    const CheckpointData again = average_checkpoints({avg_path, avg_path, avg_path}, 3);
    for (const auto& [name, t] : avg.tensors) CHECK(again.tensors.at(name).f32 == t.f32);
}

TEST_CASE("averaging rejects wrong counts and mismatched architectures") {
    CheckpointFixture fx;
    const fs::path a = fx.write("a.ckpt", 8, 0.0f, 1);
    CHECK_THROWS_AS(average_checkpoints({a}, 2), CheckpointError);
    CHECK_THROWS_AS(average_checkpoints({}, 0), CheckpointError);

    GeneratorConfig other = micro_config();
    other.base_channels = 12;
    Generator<float> gen(other, 1);
    CheckpointMeta meta;
    const fs::path o = fx.dir / "other.ckpt";
    auto params = gen.parameters();
    save_checkpoint<float>(params, fingerprint_of(other), meta, o);
    CHECK_THROWS_AS(average_checkpoints({a, o}, 2), CheckpointError);
}

TEST_CASE("ensembled checkpoint loads and produces finite outputs") {
    CheckpointFixture fx;
    std::vector<fs::path> paths;
    for (int i = 0; i < 4; ++i)
        paths.push_back(fx.write("g" + std::to_string(i) + ".ckpt", 10 + i, 0.05f * i, 100 * (i + 1)));
    const CheckpointData avg = average_checkpoints(paths, 4);
    const fs::path avg_path = fx.dir / "ens.ckpt";
    save_checkpoint_data(avg, avg_path);

    Generator<float> gen(fx.cfg, 99);
    auto params = gen.parameters();
    load_checkpoint<float>(avg_path, params, fx.fp);
    Rng rng(1);
    Tensor<float> lr = oracles::random_tensor<float>(rng, Shape(1, 3, 6, 6), 0.0, 1.0);
    CHECK(gen.forward(lr).all_finite());
}

TEST_CASE("top-k selection by score with later-step tie break") {
    CheckpointFixture fx;
    const fs::path a = fx.write("a.ckpt", 20, 0.0f, 100);
    const fs::path b = fx.write("b.ckpt", 21, 0.0f, 200);
    const fs::path c = fx.write("c.ckpt", 22, 0.0f, 300);

    std::map<std::string, double> scores{{"a.ckpt", 3.0}, {"b.ckpt", 1.0}, {"c.ckpt", 2.0}};
    auto score_fn = [&](const fs::path& p) { return scores.at(p.filename().string()); };
    auto top = select_top_checkpoints({a, b, c}, score_fn, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0] == a);  // score 3
    CHECK(top[1] == c);  // score 2

    // equal scores: the later training step wins
    auto flat = select_top_checkpoints({a, b, c}, [](const fs::path&) { return 1.0; }, 2);
    CHECK(flat[0] == c);  // step 300
    CHECK(flat[1] == b);  // step 200

    // n == all candidates returns the whole set (ordered)
    auto all = select_top_checkpoints({a, b, c}, score_fn, 3);
    CHECK(all.size() == 3);
    CHECK_THROWS_AS(select_top_checkpoints({a, b}, score_fn, 3), CheckpointError);
}

TEST_CASE("default l1 scorer ranks a trained checkpoint above random init") {
    CheckpointFixture fx;
    // "good" = generator whose params reproduce the data pattern less badly;
    // emulate by scoring the same architecture at two different offsets.
    const fs::path near = fx.write("near.ckpt", 30, 0.0f, 1);
    const fs::path far = fx.write("far.ckpt", 30, 2.0f, 2);
    const ImagePair pair = synthetic::smooth_pair(12, 2);
    auto scorer = make_l1_scorer(fx.cfg, {{pair.lr, pair.hr}});
    CHECK(scorer(near) > scorer(far));  // wildly offset weights score worse
}
