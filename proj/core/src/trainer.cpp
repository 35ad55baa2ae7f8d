// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/trainer.hpp"

#include <cstdio>

#include "rfbsr/checkpoint.hpp"

namespace rfbsr {

namespace {

void log_step(std::ostream* log, int64_t step, double lr, const LossReport& r) {
    if (!log) return;
    char line[256];
    std::snprintf(line, sizeof(line), "step %lld lr %.10g l_pix %.10g l_feat %.10g l_adv %.10g l_g %.10g l_d %.10g\n",
                  static_cast<long long>(step), lr, r.l_pix, r.l_feat, r.l_adv, r.l_g, r.l_d);
    *log << line;
    log->flush();
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Stage stage, int64_t step) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_step%08lld.ckpt", stage == Stage::psnr ? "psnr" : "gan",
                  static_cast<long long>(step));
    return dir / name;
}

void maybe_checkpoint(const TrainRun& run, Generator<float>& gen, int64_t step, TrainResult& result) {
    if (run.out_dir.empty() || run.checkpoint_every <= 0 || step % run.checkpoint_every != 0) return;
    std::filesystem::create_directories(run.out_dir);
    CheckpointMeta meta;
    meta.step = static_cast<uint64_t>(step);
    meta.stage = run.stage == Stage::psnr ? 0 : 1;
    meta.seed = run.seed;
    const auto path = checkpoint_path(run.out_dir, run.stage, step);
    auto params = gen.parameters();
    save_checkpoint<float>(params, fingerprint_of(gen.config()), meta, path);
    result.checkpoints.push_back(path);
}

double mean_of(const Tensor<float>& t) {
    double acc = 0.0;
    for (float v : t.data) acc += static_cast<double>(v);
    return acc / static_cast<double>(t.numel());
}

}  // namespace

std::pair<Tensor<float>, Tensor<float>> stack_pairs(const std::vector<ImagePair>& pairs) {
    require_shape(!pairs.empty(), "stack_pairs: empty batch");
    const Shape ls = pairs.front().lr.shape, hs = pairs.front().hr.shape;
    Tensor<float> lr(Shape(static_cast<int64_t>(pairs.size()), ls.c, ls.h, ls.w));
    Tensor<float> hr(Shape(static_cast<int64_t>(pairs.size()), hs.c, hs.h, hs.w));
    for (size_t i = 0; i < pairs.size(); ++i) {
        require_shape(pairs[i].lr.shape == ls && pairs[i].hr.shape == hs,
                      "stack_pairs: inconsistent patch sizes in batch");
        std::copy(pairs[i].lr.data.begin(), pairs[i].lr.data.end(),
                  lr.data.begin() + static_cast<int64_t>(i) * ls.numel());
        std::copy(pairs[i].hr.data.begin(), pairs[i].hr.data.end(),
                  hr.data.begin() + static_cast<int64_t>(i) * hs.numel());
    }
    return {std::move(lr), std::move(hr)};
}

TrainResult train_psnr_stage(const TrainRun& run, Generator<float>& gen, PairSampler& data,
                             std::ostream* log) {
    TrainResult result;
    AdamState<float> adam(gen.parameters());
    const LrSchedule sched = LrSchedule::psnr_stage();

    for (int64_t step = 1; step <= run.steps; ++step) {
        const auto [lr_batch, hr_batch] = stack_pairs(data.next_batch(run.batch_size));
        Tape<float> tape;
        Rec<float> sr = gen.forward(tape.constant(lr_batch));
        Rec<float> loss = l1(sr, tape.constant(hr_batch));

        LossReport rep;
        rep.l_pix = static_cast<double>(loss.value().scalar());
        rep.l_g = rep.l_pix;
        if (!rep.finite())
            throw DivergenceError("psnr stage diverged at step " + std::to_string(step) +
                                  " (last good checkpoint retained)");
        tape.backward(loss);

        const double lr = run.lr_override ? *run.lr_override : lr_at(sched, step - 1);
        adam.step(lr);
        log_step(log, step, lr, rep);
        result.reports.push_back(rep);
        maybe_checkpoint(run, gen, step, result);
    }
    return result;
}

TrainResult train_gan_stage(const TrainRun& run, Generator<float>& gen, Discriminator<float>& disc,
                            FeatureExtractor<float>* features, PairSampler& data,
                            const std::optional<std::filesystem::path>& init_checkpoint,
                            std::ostream* log) {
    run.weights.validate();
    if (init_checkpoint) {
        auto params = gen.parameters();
        load_checkpoint<float>(*init_checkpoint, params, fingerprint_of(gen.config()));
    }
    TrainResult result;
    AdamState<float> adam_g(gen.parameters());
    AdamState<float> adam_d(disc.parameters());
    const LrSchedule sched = LrSchedule::gan_stage();

    for (int64_t step = 1; step <= run.steps; ++step) {
        const auto [lr_batch, hr_batch] = stack_pairs(data.next_batch(run.batch_size));
        const double lr = run.lr_override ? *run.lr_override : lr_at(sched, step - 1);
        LossReport rep;

        // Discriminator phase: generator output is a constant here.
        const Tensor<float> sr_const = gen.forward(lr_batch);
        for (int64_t d = 0; d < run.d_steps_per_g; ++d) {
            Tape<float> tape;
            Rec<float> d_hr = disc.forward(tape.constant(hr_batch));
            Rec<float> d_sr = disc.forward(tape.constant(sr_const));
            Deltas<Rec<float>> deltas = relativistic_deltas(d_hr, d_sr);
            DiscriminatorLoss<Rec<float>> dl =
                discriminator_loss(deltas.real, deltas.fake, run.fake_literal_paper);
            rep.l_real = static_cast<double>(dl.real.value().scalar());
            rep.l_fake = static_cast<double>(dl.fake.value().scalar());
            rep.l_d = static_cast<double>(dl.total.value().scalar());
            rep.delta_real_mean = mean_of(deltas.real.value());
            rep.delta_fake_mean = mean_of(deltas.fake.value());
            if (!rep.finite())
                throw DivergenceError("gan stage (discriminator) diverged at step " + std::to_string(step));
            tape.backward(dl.total);
            adam_d.step(lr);
        }

        // Generator phase: discriminator frozen, reference logits constant.
        disc.set_trainable(false);
        {
            Tape<float> tape;
            Rec<float> sr = gen.forward(tape.constant(lr_batch));
            Rec<float> hr = tape.constant(hr_batch);
            Rec<float> l_pix = pixel_loss(sr, hr);
            Rec<float> l_feat = (features && run.use_feature_loss)
                                    ? feature_loss(*features, sr, hr_batch)
                                    : tape.constant(Tensor<float>::scalar_of(0.0f));
            Rec<float> d_hr = tape.constant(disc.forward(hr_batch));
            Rec<float> d_sr = disc.forward(sr);
            Deltas<Rec<float>> deltas = relativistic_deltas(d_hr, d_sr);
            Rec<float> l_adv = adversarial_loss_g(deltas.real, deltas.fake);
            Rec<float> l_g = generator_loss(run.weights, l_pix, l_feat, l_adv);

            rep.l_pix = static_cast<double>(l_pix.value().scalar());
            rep.l_feat = static_cast<double>(l_feat.value().scalar());
            rep.l_adv = static_cast<double>(l_adv.value().scalar());
            rep.l_g = static_cast<double>(l_g.value().scalar());
            if (!rep.finite()) {
                disc.set_trainable(true);
                throw DivergenceError("gan stage (generator) diverged at step " + std::to_string(step));
            }
            tape.backward(l_g);
            adam_g.step(lr);
        }
        disc.set_trainable(true);

        log_step(log, step, lr, rep);
        result.reports.push_back(rep);
        maybe_checkpoint(run, gen, step, result);
    }
    return result;
}

}  // namespace rfbsr
