// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Parameter-space checkpoint averaging: the published model is the arithmetic
// mean of the top N recorded generators, fused element by element.

#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "rfbsr/checkpoint.hpp"

namespace rfbsr {

/// Elementwise arithmetic mean of N checkpoints sharing one fingerprint and
/// name set. Values are accumulated in 64-bit after per-element sorting, so
/// the result is exactly permutation-invariant and the mean of N identical
/// checkpoints is bit-identical to the input.
CheckpointData average_checkpoints(const std::vector<std::filesystem::path>& paths, int64_t n);

/// Picks the n best checkpoints by a validation score (higher is better),
/// breaking ties towards the later training step. The score callback is
/// pluggable because perceptual rankings need models this library does not
/// ship; the default desk-scale scorer is negative pixel L1.
std::vector<std::filesystem::path> select_top_checkpoints(
    const std::vector<std::filesystem::path>& candidates,
    const std::function<double(const std::filesystem::path&)>& score_fn, int64_t n);

/// Score = -mean pixel L1 of the restored generator over held-out (lr, hr)
/// pairs.
std::function<double(const std::filesystem::path&)> make_l1_scorer(
    const GeneratorConfig& cfg, std::vector<std::pair<Tensor<float>, Tensor<float>>> val_pairs);

}  // namespace rfbsr
