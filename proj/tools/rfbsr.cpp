// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch command line for the rfbsr library:
//   degrade   bicubic-downscale a directory of HR images
//   train     run the psnr or gan training stage
//   infer     super-resolve a directory of LR images with a checkpoint
//   ensemble  average N checkpoints into one
//   eval      PSNR/SSIM table for result vs reference directories
//   gradcheck analytic-vs-finite-difference audit of every op and block
//   params    print the generator parameter count for a config
//
// Data products go to files or stdout; logs go to stderr. Exit codes:
//   0 ok, 2 usage, 3 config, 4 io, 5 checkpoint, 6 shape/domain,
//   7 divergence, 8 gradcheck failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rfbsr/config.hpp"
#include "rfbsr/ensemble.hpp"
#include "rfbsr/gradcheck.hpp"
#include "rfbsr/image_io.hpp"

namespace fs = std::filesystem;
using namespace rfbsr;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;
constexpr int kExitCheckpoint = 5;
constexpr int kExitShape = 6;
constexpr int kExitDivergence = 7;
constexpr int kExitGradcheck = 8;

/// Relative image paths under `dir`, either from a manifest (newline-delimited
/// relative paths) or a sorted recursive scan.
std::vector<fs::path> list_inputs(const fs::path& dir, const std::string& manifest) {
    std::vector<fs::path> rels;
    if (!manifest.empty()) {
        std::ifstream is(manifest);
        if (!is) throw IoError("cannot open manifest: " + manifest);
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty()) rels.emplace_back(line);
        }
    } else {
        if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file() && image_extension_supported(e.path()))
                rels.push_back(fs::relative(e.path(), dir));
        std::sort(rels.begin(), rels.end());
    }
    if (rels.empty()) throw IoError("no input images under " + dir.string());
    return rels;
}

AppConfig load_or_default(const std::string& config_path) {
    AppConfig cfg = config_path.empty() ? AppConfig{} : load_config_file(config_path);
    cfg.validate();
    std::cerr << "effective config:\n" << config_to_json(cfg) << "\n";
    return cfg;
}

std::vector<SourceImage> load_sources(const fs::path& dir) {
    std::vector<SourceImage> images;
    for (const fs::path& rel : list_inputs(dir, "")) {
        images.push_back(SourceImage{rel.generic_string(), load_image(dir / rel)});
    }
    return images;
}

int cmd_degrade(const std::string& in_dir, const std::string& out_dir, int64_t scale,
                const std::string& manifest) {
    for (const fs::path& rel : list_inputs(in_dir, manifest)) {
        const Tensor<float> hr = load_image(fs::path(in_dir) / rel);
        const Tensor<float> lr = clamp01(bicubic_resize(hr, Rational{1, scale}));
        const fs::path out_path = fs::path(out_dir) / rel;
        fs::create_directories(out_path.parent_path().empty() ? fs::path(out_dir) : out_path.parent_path());
        save_image(lr, out_path);
    }
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, const std::string& stage_flag,
              const std::string& init_ckpt, const std::string& data_dir,
              std::optional<int64_t> steps_flag, std::optional<uint64_t> seed_flag,
              std::optional<int> threads) {
    AppConfig cfg = load_or_default(config_path);
    if (!stage_flag.empty()) cfg.train.stage = stage_flag == "gan" ? Stage::gan : Stage::psnr;
    if (steps_flag) cfg.train.steps = *steps_flag;
    if (seed_flag) cfg.train.seed = *seed_flag;
    if (threads) cfg.data.workers = *threads;
    if (!data_dir.empty()) cfg.data.train_dir = data_dir;
    cfg.train.out_dir = out_dir;

    if (cfg.data.train_dir.empty()) throw ConfigError("data.train_dir is required for training");
    RandomPatchSampler sampler(load_sources(cfg.data.train_dir), cfg.data.patch, cfg.model.scale,
                               cfg.train.seed, cfg.data.augment, cfg.data.workers);
    Generator<float> gen(cfg.model, cfg.train.seed);

    TrainResult result;
    if (cfg.train.stage == Stage::psnr) {
        result = train_psnr_stage(cfg.train, gen, sampler, &std::cerr);
    } else {
        Discriminator<float> disc(cfg.disc, cfg.train.seed);
        FeatureExtractor<float> features(cfg.features, cfg.feature_seed);
        std::optional<fs::path> init;
        if (!init_ckpt.empty()) init = init_ckpt;
        result = train_gan_stage(cfg.train, gen, disc, &features, sampler, init, &std::cerr);
    }
    std::cerr << "training done: " << result.reports.size() << " steps, " << result.checkpoints.size()
              << " checkpoints\n";
    return 0;
}

int cmd_infer(const std::string& config_path, const std::string& ckpt, const std::string& in_dir,
              const std::string& out_dir, int64_t max_lr_side, bool force) {
    AppConfig cfg = load_or_default(config_path);
    Generator<float> gen(cfg.model, cfg.train.seed);
    auto params = gen.parameters();
    const auto skipped = load_checkpoint<float>(ckpt, params, fingerprint_of(cfg.model), force);
    for (const auto& name : skipped) std::cerr << "skipped checkpoint entry: " << name << "\n";

    for (const fs::path& rel : list_inputs(in_dir, "")) {
        const Tensor<float> lr = load_image(fs::path(in_dir) / rel);
        if (lr.shape.h > max_lr_side || lr.shape.w > max_lr_side)
            throw ShapeError("input " + rel.generic_string() + " exceeds --max-lr-side " +
                             std::to_string(max_lr_side) + " (tiled inference is not supported)");
        const Tensor<float> sr = gen.forward(lr);
        const fs::path out_path = fs::path(out_dir) / rel;
        fs::create_directories(out_path.parent_path().empty() ? fs::path(out_dir) : out_path.parent_path());
        save_image(sr, out_path);  // save clamps to [0,1] and quantizes
    }
    return 0;
}

int cmd_ensemble(const std::vector<std::string>& ckpts, int64_t n, const std::string& out) {
    std::vector<fs::path> paths(ckpts.begin(), ckpts.end());
    const CheckpointData avg = average_checkpoints(paths, n);
    save_checkpoint_data(avg, out);
    std::cerr << "ensemble of " << n << " checkpoints written to " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& sr_dir, const std::string& hr_dir,
             std::optional<int64_t> crop, bool on_quantized) {
    AppConfig cfg = load_or_default(config_path);
    EvalProtocol protocol = cfg.eval;
    if (crop) protocol.crop = *crop;
    if (on_quantized) protocol.on_quantized = true;
    const EvalTable table = evaluate(sr_dir, hr_dir, protocol);
    std::cout << table.csv();
    return 0;
}

int cmd_gradcheck(int instances, uint64_t seed) {
    GradCheckOptions opts;
    opts.instances = instances;
    opts.seed = seed;
    const GradCheckReport report = run_gradcheck(opts);
    std::cerr << format_report(report);
    return report.all_pass ? 0 : kExitGradcheck;
}

int cmd_params(const std::string& config_path) {
    AppConfig cfg = load_or_default(config_path);
    Generator<float> gen(cfg.model, cfg.train.seed);
    std::cout << count_parameters<float>(gen.parameters()) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rfbsr: x16 super-resolution training, inference and evaluation"};
    app.require_subcommand(1);

    std::string config_path, in_dir, out_dir, manifest, ckpt, stage, init_ckpt, sr_dir, hr_dir, out_file,
        data_dir;
    std::vector<std::string> ckpts;
    int64_t scale = 16, n_models = 0, max_lr_side = 256;
    std::optional<int64_t> steps_flag, crop_flag;
    std::optional<uint64_t> seed_flag;
    std::optional<int> threads;
    bool on_quantized = false, force = false;
    int gc_instances = 20;
    uint64_t gc_seed = GradCheckOptions{}.seed;

    auto* degrade = app.add_subcommand("degrade", "bicubic-downscale a directory of images");
    degrade->add_option("--in", in_dir, "input directory (HR images)")->required();
    degrade->add_option("--out", out_dir, "output directory (LR images)")->required();
    degrade->add_option("--scale", scale, "integer downscale factor")->default_val(16)
        ->check(CLI::PositiveNumber);
    degrade->add_option("--manifest", manifest, "newline-delimited relative paths to process");

    auto* train = app.add_subcommand("train", "run a training stage");
    train->add_option("--config", config_path, "JSON config file");
    train->add_option("--out", out_dir, "checkpoint output directory")->required();
    train->add_option("--stage", stage, "psnr|gan (overrides config)")
        ->check(CLI::IsMember({"psnr", "gan"}));
    train->add_option("--init", init_ckpt, "initial generator checkpoint (gan stage)");
    train->add_option("--data", data_dir, "training image directory (overrides config)");
    train->add_option("--steps", steps_flag, "step count (overrides config)");
    train->add_option("--seed", seed_flag, "rng seed (overrides config)");
    train->add_option("--threads", threads, "data loader worker cap");

    auto* infer = app.add_subcommand("infer", "super-resolve a directory of LR images");
    infer->add_option("--config", config_path, "JSON config file");
    infer->add_option("--checkpoint", ckpt, "generator checkpoint")->required();
    infer->add_option("--in", in_dir, "input directory (LR images)")->required();
    infer->add_option("--out", out_dir, "output directory (SR images)")->required();
    infer->add_option("--max-lr-side", max_lr_side, "largest accepted LR side")->default_val(256);
    infer->add_flag("--force", force, "load the name/shape intersection of a mismatched checkpoint");

    auto* ens = app.add_subcommand("ensemble", "average N checkpoints elementwise");
    ens->add_option("--n", n_models, "number of checkpoints (must equal the list length)")->required();
    ens->add_option("--out", out_file, "output checkpoint path")->required();
    ens->add_option("checkpoints", ckpts, "checkpoint files")->required()->expected(-1);

    auto* eval = app.add_subcommand("eval", "PSNR/SSIM table (csv on stdout)");
    eval->add_option("--config", config_path, "JSON config file");
    eval->add_option("--sr", sr_dir, "result image directory")->required();
    eval->add_option("--hr", hr_dir, "reference image directory")->required();
    eval->add_option("--crop", crop_flag, "center crop size (0 disables; default 1000)");
    eval->add_flag("--on-quantized", on_quantized, "snap both images to 8-bit levels first");

    auto* gradcheck = app.add_subcommand("gradcheck", "gradient oracle audit (nonzero exit on failure)");
    gradcheck->add_option("--instances", gc_instances, "random instances per case")->default_val(20);
    gradcheck->add_option("--seed", gc_seed, "oracle rng seed");

    auto* params = app.add_subcommand("params", "print the generator parameter count");
    params->add_option("--config", config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (degrade->parsed()) return cmd_degrade(in_dir, out_dir, scale, manifest);
        if (train->parsed())
            return cmd_train(config_path, out_dir, stage, init_ckpt, data_dir, steps_flag, seed_flag, threads);
        if (infer->parsed()) return cmd_infer(config_path, ckpt, in_dir, out_dir, max_lr_side, force);
        if (ens->parsed()) return cmd_ensemble(ckpts, n_models, out_file);
        if (eval->parsed()) return cmd_eval(config_path, sr_dir, hr_dir, crop_flag, on_quantized);
        if (gradcheck->parsed()) return cmd_gradcheck(gc_instances, gc_seed);
        if (params->parsed()) return cmd_params(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CheckpointError& e) {
        std::cerr << "error: checkpoint: " << e.what() << "\n";
        return kExitCheckpoint;
    } catch (const DivergenceError& e) {
        std::cerr << "error: divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const ShapeError& e) {
        std::cerr << "error: shape: " << e.what() << "\n";
        return kExitShape;
    } catch (const IoError& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
