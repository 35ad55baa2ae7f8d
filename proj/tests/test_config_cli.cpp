// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Config-file semantics plus end-to-end runs of the rfbsr binary (path baked
// in by CMake as RFBSR_CLI_PATH).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rfbsr/config.hpp"
#include "rfbsr/image_io.hpp"
#include "synthetic.hpp"

using namespace rfbsr;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RFBSR_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rfbsr_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    return std::string((std::istreambuf_iterator<char>(is)), {});
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

const char* kMicroConfig = R"({
  "model": {"n_rrdb": 1, "n_rrfdb": 1, "rfb_per_rrfdb": 2, "base_channels": 8, "growth": 4,
            "scale": 2, "upsample_plan": ["spc"], "disc_base_channels": 4, "disc_layers": 4,
            "feature_channels": [4]},
  "train": {"steps": 3, "batch": 2, "checkpoint_every": 1, "seed": 9},
  "data": {"patch": 16},
  "eval": {"crop": 8}
})";

}  // namespace

TEST_CASE("config defaults and section parsing") {
    const AppConfig cfg = parse_config("{}");
    CHECK(cfg.model.n_rrdb == 16);
    CHECK(cfg.model.scale == 16);
    CHECK(cfg.train.batch_size == 16);
    CHECK(cfg.train.checkpoint_every == 5000);
    CHECK(cfg.train.weights.lambda == 10.0);
    CHECK(cfg.train.weights.eta == 5e-3);
    CHECK(cfg.data.patch == 512);
    CHECK(cfg.eval.crop == 1000);
    CHECK_FALSE(cfg.train.lr_override.has_value());

    const AppConfig micro = parse_config(kMicroConfig);
    CHECK(micro.model.base_channels == 8);
    CHECK(micro.model.upsample_plan.size() == 1);
    CHECK(micro.model.upsample_plan[0].kind == UpsampleKind::spc);
    CHECK(micro.train.seed == 9);
}

TEST_CASE("unknown keys and invalid values are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"model": {"n_rrbd": 4}})"), ConfigError);  // typo
    CHECK_THROWS_AS(parse_config(R"({"extras": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"train": {"stage": "warmup"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"train": {"lr": -1.0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"scale": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"data": {"patch": 13}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"n_rrdb": "many"}})"), ConfigError);
}

TEST_CASE("upsample plan names round-trip through the config echo") {
    AppConfig cfg = parse_config(R"({"model": {"scale": 4, "upsample_plan": ["nni_bare", "spc"]}})");
    CHECK(cfg.model.upsample_plan[0].with_rfb == false);
    const std::string echoed = config_to_json(cfg);
    CHECK(echoed.find("nni_bare") != std::string::npos);
    const AppConfig reparsed = parse_config(echoed);
    CHECK(reparsed.model.upsample_plan == cfg.model.upsample_plan);
}

TEST_CASE("scale without an explicit plan derives the stage count") {
    const AppConfig cfg = parse_config(R"({"model": {"scale": 4}})");
    CHECK(cfg.model.upsample_plan.size() == 2);
    CHECK(cfg.model.upsample_plan[0].kind == UpsampleKind::nni);
    CHECK(cfg.model.upsample_plan[1].kind == UpsampleKind::spc);
}

TEST_CASE("cli: usage and error exit codes") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("nonsense") == 2);
    CHECK(run_cli("degrade --in /nonexistent_dir_xyz --out /tmp/out_xyz") == 4);
    const fs::path dir = fresh_dir("codes");
    write_file(dir / "bad.json", "{\"bogus\": 1}");
    CHECK(run_cli("params --config " + (dir / "bad.json").string()) == 3);
}

TEST_CASE("cli: degrade mirrors the tree and reruns byte-identically") {
    const fs::path dir = fresh_dir("degrade");
    fs::create_directories(dir / "hr" / "sub");
    save_image(synthetic::smooth_image(64, 64, 0.1), dir / "hr" / "a.png");
    save_image(synthetic::smooth_image(64, 48, 0.4), dir / "hr" / "sub" / "b.png");

    REQUIRE(run_cli("degrade --scale 16 --in " + (dir / "hr").string() + " --out " + (dir / "lr").string()) == 0);
    Tensor<float> a = load_image(dir / "lr" / "a.png");
    CHECK(a.shape == Shape(1, 3, 4, 4));
    Tensor<float> b = load_image(dir / "lr" / "sub" / "b.png");
    CHECK(b.shape == Shape(1, 3, 4, 3));

    const std::string first = file_bytes(dir / "lr" / "a.png");
    REQUIRE(run_cli("degrade --scale 16 --in " + (dir / "hr").string() + " --out " + (dir / "lr2").string()) == 0);
    CHECK(file_bytes(dir / "lr2" / "a.png") == first);

    // manifest restricts the file set
    write_file(dir / "manifest.txt", "a.png\n");
    REQUIRE(run_cli("degrade --scale 2 --in " + (dir / "hr").string() + " --out " + (dir / "lr3").string() +
                    " --manifest " + (dir / "manifest.txt").string()) == 0);
    CHECK(fs::exists(dir / "lr3" / "a.png"));
    CHECK_FALSE(fs::exists(dir / "lr3" / "sub" / "b.png"));
}

TEST_CASE("cli: params prints the micro generator count") {
    const fs::path dir = fresh_dir("params");
    write_file(dir / "cfg.json", kMicroConfig);
    const std::string out_file = (dir / "count.txt").string();
    const std::string cmd = std::string(RFBSR_CLI_PATH) + " params --config " + (dir / "cfg.json").string() +
                            " > " + out_file + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    std::ifstream is(out_file);
    int64_t count = 0;
    is >> count;
    Generator<float> gen(parse_config(kMicroConfig).model, 0);
    CHECK(count == count_parameters<float>(gen.parameters()));
}

TEST_CASE("cli: train, infer, ensemble and eval compose end to end") {
    const fs::path dir = fresh_dir("e2e");
    write_file(dir / "cfg.json", kMicroConfig);
    fs::create_directories(dir / "train");
    save_image(synthetic::smooth_image(48, 48, 0.2), dir / "train" / "img0.png");
    save_image(synthetic::smooth_image(48, 48, 0.6), dir / "train" / "img1.png");

    // psnr stage: 3 steps, checkpoint every step
    REQUIRE(run_cli("train --config " + (dir / "cfg.json").string() + " --data " + (dir / "train").string() +
                    " --out " + (dir / "ck").string()) == 0);
    REQUIRE(fs::exists(dir / "ck" / "psnr_step00000003.ckpt"));

    // gan stage initialized from the psnr checkpoint; 10 recorded models
    REQUIRE(run_cli("train --config " + (dir / "cfg.json").string() + " --data " + (dir / "train").string() +
                    " --stage gan --steps 10 --init " + (dir / "ck" / "psnr_step00000003.ckpt").string() +
                    " --out " + (dir / "ckg").string()) == 0);
    REQUIRE(fs::exists(dir / "ckg" / "gan_step00000010.ckpt"));

    // ensemble of the ten recorded gan models
    std::string cks;
    for (int i = 1; i <= 10; ++i) {
        char name[40];
        std::snprintf(name, sizeof(name), "gan_step%08d.ckpt", i);
        cks += (dir / "ckg" / name).string() + " ";
    }
    REQUIRE(run_cli("ensemble --n 10 --out " + (dir / "ens.ckpt").string() + " " + cks) == 0);
    CHECK(run_cli("ensemble --n 2 --out " + (dir / "bad.ckpt").string() + " " + cks) == 5);

    // infer from the ensembled checkpoint
    fs::create_directories(dir / "lr");
    save_image(synthetic::smooth_image(12, 12, 0.3), dir / "lr" / "x.png");
    REQUIRE(run_cli("infer --config " + (dir / "cfg.json").string() + " --checkpoint " +
                    (dir / "ens.ckpt").string() + " --in " + (dir / "lr").string() + " --out " +
                    (dir / "sr").string()) == 0);
    CHECK(load_image(dir / "sr" / "x.png").shape == Shape(1, 3, 24, 24));

    // rerun of infer is byte-identical
    const std::string sr_bytes = file_bytes(dir / "sr" / "x.png");
    REQUIRE(run_cli("infer --config " + (dir / "cfg.json").string() + " --checkpoint " +
                    (dir / "ens.ckpt").string() + " --in " + (dir / "lr").string() + " --out " +
                    (dir / "sr2").string()) == 0);
    CHECK(file_bytes(dir / "sr2" / "x.png") == sr_bytes);

    // eval: sr vs itself scores the psnr cap; csv lands on stdout
    const std::string table_file = (dir / "table.csv").string();
    const std::string eval_cmd = std::string(RFBSR_CLI_PATH) + " eval --sr " + (dir / "sr").string() +
                                 " --hr " + (dir / "sr2").string() + " --crop 16 > " + table_file +
                                 " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(eval_cmd.c_str())) == 0);
    const std::string table = file_bytes(table_file);
    CHECK(table.find("filename,psnr_db,ssim") == 0);
    CHECK(table.find("x.png,100.000000,1.000000") != std::string::npos);

    // checkpoint/architecture mismatch without --force is a checkpoint error
    write_file(dir / "other.json", R"({"model": {"base_channels": 12, "growth": 8, "scale": 2,
      "n_rrdb": 1, "n_rrfdb": 1, "rfb_per_rrfdb": 2, "upsample_plan": ["spc"]}})");
    CHECK(run_cli("infer --config " + (dir / "other.json").string() + " --checkpoint " +
                  (dir / "ens.ckpt").string() + " --in " + (dir / "lr").string() + " --out " +
                  (dir / "srx").string()) == 5);

    // oversized input refused with the shape exit code
    fs::create_directories(dir / "big");
    save_image(synthetic::smooth_image(300, 300, 0.1), dir / "big" / "big.png");
    CHECK(run_cli("infer --config " + (dir / "cfg.json").string() + " --checkpoint " +
                  (dir / "ens.ckpt").string() + " --in " + (dir / "big").string() + " --out " +
                  (dir / "srb").string() + " --max-lr-side 256") == 6);
}

TEST_CASE("cli: training determinism across reruns") {
    const fs::path dir = fresh_dir("determinism");
    write_file(dir / "cfg.json", kMicroConfig);
    fs::create_directories(dir / "train");
    save_image(synthetic::smooth_image(48, 48, 0.2), dir / "train" / "img0.png");

    const std::string base_cmd =
        "train --config " + (dir / "cfg.json").string() + " --data " + (dir / "train").string();
    REQUIRE(run_cli(base_cmd + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli(base_cmd + " --out " + (dir / "b").string()) == 0);
    CHECK(file_bytes(dir / "a" / "psnr_step00000003.ckpt") == file_bytes(dir / "b" / "psnr_step00000003.ckpt"));

    // a different seed changes the outcome
    REQUIRE(run_cli(base_cmd + " --seed 123 --out " + (dir / "c").string()) == 0);
    CHECK(file_bytes(dir / "c" / "psnr_step00000003.ckpt") != file_bytes(dir / "a" / "psnr_step00000003.ckpt"));
}

TEST_CASE("cli: gradcheck exits zero on a reduced run") {
    CHECK(run_cli("gradcheck --instances 2") == 0);
}
