// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "rfbsr/bicubic.hpp"
#include "rfbsr/metrics.hpp"
#include "rfbsr/networks.hpp"

using namespace rfbsr;

namespace {

Tensor<float> random_image(Shape s, uint64_t seed) {
    Rng rng(seed);
    Tensor<float> t(s);
    for (auto& v : t.data) v = static_cast<float>(rng.uniform());
    return t;
}

void BM_Conv2dForward3x3(benchmark::State& state) {
    const int64_t c = state.range(0);
    Rng rng(1);
    Tensor<float> x = random_image(Shape(1, c, 32, 32), 1);
    Tensor<float> w = random_image(Shape(c, c, 3, 3), 2);
    const ConvSpec spec = same_pad_spec(3, 3);
    for (auto _ : state) {
        Tensor<float> y = conv2d(x, w, spec);
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(state.iterations() * x.numel());
}
BENCHMARK(BM_Conv2dForward3x3)->Arg(16)->Arg(64);

void BM_Conv2dBackwardData(benchmark::State& state) {
    const int64_t c = state.range(0);
    Tensor<float> dy = random_image(Shape(1, c, 32, 32), 3);
    Tensor<float> w = random_image(Shape(c, c, 3, 3), 4);
    const ConvSpec spec = same_pad_spec(3, 3);
    for (auto _ : state) {
        Tensor<float> dx = kernels::conv2d_backward_data(dy, w, Shape(1, c, 32, 32), spec);
        benchmark::DoNotOptimize(dx.data.data());
    }
}
BENCHMARK(BM_Conv2dBackwardData)->Arg(16)->Arg(64);

void BM_PixelShuffle(benchmark::State& state) {
    Tensor<float> x = random_image(Shape(1, 64, 64, 64), 5);
    for (auto _ : state) {
        Tensor<float> y = pixel_shuffle(x, 2);
        benchmark::DoNotOptimize(y.data.data());
    }
}
BENCHMARK(BM_PixelShuffle);

void BM_NearestUpsample(benchmark::State& state) {
    Tensor<float> x = random_image(Shape(1, 64, 64, 64), 6);
    for (auto _ : state) {
        Tensor<float> y = nearest_upsample(x, 2);
        benchmark::DoNotOptimize(y.data.data());
    }
}
BENCHMARK(BM_NearestUpsample);

void BM_BicubicDown16(benchmark::State& state) {
    Tensor<float> img = random_image(Shape(1, 3, 512, 512), 7);
    for (auto _ : state) {
        Tensor<float> lr = bicubic_resize(img, Rational{1, 16});
        benchmark::DoNotOptimize(lr.data.data());
    }
}
BENCHMARK(BM_BicubicDown16);

void BM_Ssim(benchmark::State& state) {
    const int64_t side = state.range(0);
    Tensor<float> a = random_image(Shape(1, 3, side, side), 8);
    Tensor<float> b = random_image(Shape(1, 3, side, side), 9);
    for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(256);

void BM_RfbForward(benchmark::State& state) {
    Rng rng(10);
    Rfb<float> rfb("rfb", 64, 64, 1.0f, 0.2f, rng, 0.1);
    Tensor<float> x = random_image(Shape(1, 64, 32, 32), 11);
    for (auto _ : state) {
        Tensor<float> y = rfb.forward(x);
        benchmark::DoNotOptimize(y.data.data());
    }
}
BENCHMARK(BM_RfbForward);

void BM_DeskGeneratorForward(benchmark::State& state) {
    GeneratorConfig cfg;
    cfg.n_rrdb = 2;
    cfg.n_rrfdb = 1;
    cfg.base_channels = 16;
    cfg.growth = 8;
    cfg.scale = 4;
    cfg.upsample_plan = {{UpsampleKind::nni, true}, {UpsampleKind::spc, true}};
    Generator<float> gen(cfg, 12);
    Tensor<float> lr = random_image(Shape(1, 3, 24, 24), 13);
    for (auto _ : state) {
        Tensor<float> sr = gen.forward(lr);
        benchmark::DoNotOptimize(sr.data.data());
    }
}
BENCHMARK(BM_DeskGeneratorForward);

}  // namespace

BENCHMARK_MAIN();
