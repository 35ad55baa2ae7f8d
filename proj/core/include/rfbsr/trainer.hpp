// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Two-stage training: a pixel-L1 stage, then the adversarial stage that
// alternates one discriminator update with one generator update per
// iteration. Generator checkpoints are written on a fixed step cadence.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "rfbsr/dataset.hpp"
#include "rfbsr/losses.hpp"
#include "rfbsr/optim.hpp"

namespace rfbsr {

struct TrainRun {
    Stage stage = Stage::psnr;
    int64_t steps = 0;
    int64_t batch_size = 16;
    int64_t checkpoint_every = 5000;
    uint64_t seed = 0;
    std::filesystem::path out_dir;  // empty -> train without writing checkpoints
    std::optional<double> lr_override;
    int64_t d_steps_per_g = 1;
    bool use_feature_loss = true;
    LossWeights weights;
    bool fake_literal_paper = false;
};

struct TrainResult {
    std::vector<std::filesystem::path> checkpoints;
    std::vector<LossReport> reports;  // one per generator step
};

/// (n,3,h,w) LR and HR batches from equally-sized pairs.
std::pair<Tensor<float>, Tensor<float>> stack_pairs(const std::vector<ImagePair>& pairs);

/// Pixel-L1 stage. Optimizes mean absolute error only, on the psnr learning
/// rate schedule. A non-finite loss or gradient aborts with DivergenceError;
/// checkpoints already on disk stay.
TrainResult train_psnr_stage(const TrainRun& run, Generator<float>& gen, PairSampler& data,
                             std::ostream* log = nullptr);

/// Adversarial stage. The generator starts from `init_checkpoint` when given
/// (it must match the generator's fingerprint). Each iteration draws one
/// batch, updates the discriminator (generator output treated as constant),
/// then updates the generator through the frozen discriminator.
TrainResult train_gan_stage(const TrainRun& run, Generator<float>& gen, Discriminator<float>& disc,
                            FeatureExtractor<float>* features, PairSampler& data,
                            const std::optional<std::filesystem::path>& init_checkpoint = std::nullopt,
                            std::ostream* log = nullptr);

}  // namespace rfbsr
