// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rfbsr/bicubic.hpp"
#include "rfbsr/rng.hpp"
#include "rfbsr/tensor.hpp"

namespace rfbsr {

struct AugmentFlags {
    bool hflip = false;
    int rot90_k = 0;  // quarter turns, 0..3
};

/// Aligned training example: the LR member is the bicubic 1/scale degradation
/// of the HR crop, both in [0,1], with provenance for reproducibility.
struct ImagePair {
    Tensor<float> lr;  // (1,3,h,w)
    Tensor<float> hr;  // (1,3,scale*h,scale*w)
    std::string source_id;
    int64_t crop_y = 0;  // HR coords, multiples of scale
    int64_t crop_x = 0;
    AugmentFlags aug;
};

template <class S>
Tensor<S> hflip(const Tensor<S>& x);

/// Counter-clockwise quarter turns.
template <class S>
Tensor<S> rot90(const Tensor<S>& x, int k);

template <class S>
Tensor<S> crop(const Tensor<S>& x, int64_t y0, int64_t x0, int64_t h, int64_t w);

template <class S>
Tensor<S> clamp01(const Tensor<S>& x);

/// Crops a random patch x patch window (offsets are HR multiples of scale so
/// LR coordinates stay integral) and degrades it by bicubic 1/scale. The crop
/// is degraded after cropping; away from borders this equals degrading the
/// whole image first, and it avoids caching 1/scale copies.
ImagePair sample_pair(const Tensor<float>& hr_image, const std::string& source_id, int64_t patch,
                      int64_t scale, Rng& rng);

/// Applies the same flip/rotation to both members.
ImagePair apply_augment(ImagePair pair, AugmentFlags flags);

/// Draws flags (fair coin flip, uniform quarter turn) and applies them.
ImagePair augment(ImagePair pair, Rng& rng);

/// Batch source for the trainer.
class PairSampler {
public:
    virtual ~PairSampler() = default;
    virtual std::vector<ImagePair> next_batch(int64_t n) = 0;
};

/// Repeats one fixed pair; the overfit-sanity workload.
class FixedPairSampler : public PairSampler {
public:
    explicit FixedPairSampler(ImagePair pair) : pair_(std::move(pair)) {}
    std::vector<ImagePair> next_batch(int64_t n) override {
        return std::vector<ImagePair>(static_cast<size_t>(n), pair_);
    }

private:
    ImagePair pair_;
};

struct SourceImage {
    std::string id;
    Tensor<float> image;
};

/// Draws random augmented patches from a fixed set of HR images. All random
/// decisions are made serially on the calling thread; `workers` threads only
/// materialize the already-decided crops into indexed slots, so batches are
/// identical for any worker count.
class RandomPatchSampler : public PairSampler {
public:
    RandomPatchSampler(std::vector<SourceImage> images, int64_t patch, int64_t scale, uint64_t seed,
                       bool augment = true, int workers = 0);
    ~RandomPatchSampler() override;

    std::vector<ImagePair> next_batch(int64_t n) override;

private:
    struct Draw {
        size_t image_index;
        int64_t crop_y, crop_x;
        AugmentFlags aug;
    };
    ImagePair materialize(const Draw& d) const;

    std::vector<SourceImage> images_;
    int64_t patch_;
    int64_t scale_;
    bool augment_;
    int workers_;
    Rng rng_;
};

}  // namespace rfbsr
