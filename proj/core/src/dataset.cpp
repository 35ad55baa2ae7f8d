// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/dataset.hpp"

#include <algorithm>
#include <thread>

namespace rfbsr {

template <class S>
Tensor<S> hflip(const Tensor<S>& x) {
    Tensor<S> y(x.shape);
    for (int64_t n = 0; n < x.shape.n; ++n)
        for (int64_t c = 0; c < x.shape.c; ++c)
            for (int64_t i = 0; i < x.shape.h; ++i)
                for (int64_t j = 0; j < x.shape.w; ++j) y.at(n, c, i, j) = x.at(n, c, i, x.shape.w - 1 - j);
    return y;
}

template <class S>
Tensor<S> rot90(const Tensor<S>& x, int k) {
    k = ((k % 4) + 4) % 4;
    if (k == 0) return x;
    Tensor<S> y(k % 2 == 0 ? x.shape : Shape(x.shape.n, x.shape.c, x.shape.w, x.shape.h));
    for (int64_t n = 0; n < x.shape.n; ++n)
        for (int64_t c = 0; c < x.shape.c; ++c)
            for (int64_t i = 0; i < x.shape.h; ++i)
                for (int64_t j = 0; j < x.shape.w; ++j) {
                    const S v = x.at(n, c, i, j);
                    if (k == 1)
                        y.at(n, c, x.shape.w - 1 - j, i) = v;
                    else if (k == 2)
                        y.at(n, c, x.shape.h - 1 - i, x.shape.w - 1 - j) = v;
                    else
                        y.at(n, c, j, x.shape.h - 1 - i) = v;
                }
    return y;
}

template <class S>
Tensor<S> crop(const Tensor<S>& x, int64_t y0, int64_t x0, int64_t h, int64_t w) {
    require_shape(y0 >= 0 && x0 >= 0 && y0 + h <= x.shape.h && x0 + w <= x.shape.w,
                  "crop: window out of bounds");
    Tensor<S> y(Shape(x.shape.n, x.shape.c, h, w));
    for (int64_t n = 0; n < x.shape.n; ++n)
        for (int64_t c = 0; c < x.shape.c; ++c)
            for (int64_t i = 0; i < h; ++i) {
                const S* src = &x.data[static_cast<size_t>(((n * x.shape.c + c) * x.shape.h + y0 + i) * x.shape.w + x0)];
                S* dst = &y.data[static_cast<size_t>(((n * y.shape.c + c) * h + i) * w)];
                std::copy_n(src, w, dst);
            }
    return y;
}

template <class S>
Tensor<S> clamp01(const Tensor<S>& x) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = std::clamp(x.data[i], S(0), S(1));
    return y;
}

template Tensor<float> hflip<float>(const Tensor<float>&);
template Tensor<double> hflip<double>(const Tensor<double>&);
template Tensor<float> rot90<float>(const Tensor<float>&, int);
template Tensor<double> rot90<double>(const Tensor<double>&, int);
template Tensor<float> crop<float>(const Tensor<float>&, int64_t, int64_t, int64_t, int64_t);
template Tensor<double> crop<double>(const Tensor<double>&, int64_t, int64_t, int64_t, int64_t);
template Tensor<float> clamp01<float>(const Tensor<float>&);
template Tensor<double> clamp01<double>(const Tensor<double>&);

ImagePair sample_pair(const Tensor<float>& hr_image, const std::string& source_id, int64_t patch,
                      int64_t scale, Rng& rng) {
    require_shape(patch % scale == 0, "sample_pair: patch must be divisible by the scale");
    require_shape(hr_image.shape.h >= patch && hr_image.shape.w >= patch,
                  "sample_pair: image " + hr_image.shape.str() + " smaller than patch " +
                      std::to_string(patch));
    const int64_t ny = (hr_image.shape.h - patch) / scale + 1;
    const int64_t nx = (hr_image.shape.w - patch) / scale + 1;
    const int64_t y0 = scale * static_cast<int64_t>(rng.below(static_cast<uint64_t>(ny)));
    const int64_t x0 = scale * static_cast<int64_t>(rng.below(static_cast<uint64_t>(nx)));

    ImagePair pair;
    pair.hr = crop(hr_image, y0, x0, patch, patch);
    pair.lr = clamp01(bicubic_resize(pair.hr, Rational{1, scale}));
    pair.source_id = source_id;
    pair.crop_y = y0;
    pair.crop_x = x0;
    return pair;
}

ImagePair apply_augment(ImagePair pair, AugmentFlags flags) {
    if (flags.hflip) {
        pair.lr = hflip(pair.lr);
        pair.hr = hflip(pair.hr);
    }
    if (flags.rot90_k % 4 != 0) {
        pair.lr = rot90(pair.lr, flags.rot90_k);
        pair.hr = rot90(pair.hr, flags.rot90_k);
    }
    pair.aug.hflip = pair.aug.hflip != flags.hflip;
    pair.aug.rot90_k = (pair.aug.rot90_k + flags.rot90_k) % 4;
    return pair;
}

ImagePair augment(ImagePair pair, Rng& rng) {
    AugmentFlags flags;
    flags.hflip = rng.coin();
    flags.rot90_k = static_cast<int>(rng.below(4));
    return apply_augment(std::move(pair), flags);
}

RandomPatchSampler::RandomPatchSampler(std::vector<SourceImage> images, int64_t patch, int64_t scale,
                                       uint64_t seed, bool augment, int workers)
    : images_(std::move(images)),
      patch_(patch),
      scale_(scale),
      augment_(augment),
      workers_(workers),
      rng_(Rng::derive(seed, "data")) {
    require_shape(!images_.empty(), "sampler: no source images");
    for (const SourceImage& im : images_)
        require_shape(im.image.shape.h >= patch && im.image.shape.w >= patch,
                      "sampler: image " + im.id + " smaller than patch size");
}

RandomPatchSampler::~RandomPatchSampler() = default;

ImagePair RandomPatchSampler::materialize(const Draw& d) const {
    const SourceImage& src = images_[d.image_index];
    ImagePair pair;
    pair.hr = crop(src.image, d.crop_y, d.crop_x, patch_, patch_);
    pair.lr = clamp01(bicubic_resize(pair.hr, Rational{1, scale_}));
    pair.source_id = src.id;
    pair.crop_y = d.crop_y;
    pair.crop_x = d.crop_x;
    return apply_augment(std::move(pair), d.aug);
}

std::vector<ImagePair> RandomPatchSampler::next_batch(int64_t n) {
    // All draws happen here, on the caller's thread, in a fixed order.
    std::vector<Draw> draws(static_cast<size_t>(n));
    for (auto& d : draws) {
        d.image_index = static_cast<size_t>(rng_.below(images_.size()));
        const auto& im = images_[d.image_index].image;
        d.crop_y = scale_ * static_cast<int64_t>(rng_.below(static_cast<uint64_t>((im.shape.h - patch_) / scale_ + 1)));
        d.crop_x = scale_ * static_cast<int64_t>(rng_.below(static_cast<uint64_t>((im.shape.w - patch_) / scale_ + 1)));
        if (augment_) {
            d.aug.hflip = rng_.coin();
            d.aug.rot90_k = static_cast<int>(rng_.below(4));
        }
    }

    std::vector<ImagePair> batch(static_cast<size_t>(n));
    if (workers_ <= 1) {
        for (size_t i = 0; i < draws.size(); ++i) batch[i] = materialize(draws[i]);
        return batch;
    }
    // Workers fill disjoint indexed slots; the result does not depend on
    // scheduling.
    std::vector<std::thread> pool;
    const size_t stride = static_cast<size_t>(workers_);
    pool.reserve(stride);
    for (size_t w = 0; w < stride; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < draws.size(); i += stride) batch[i] = materialize(draws[i]);
        });
    }
    for (auto& t : pool) t.join();
    return batch;
}

}  // namespace rfbsr
