// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/bicubic.hpp"

#include <algorithm>
#include <cmath>

namespace rfbsr {

double keys_cubic(double x, double a) {
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

int64_t resize_out_len(int64_t in_len, Rational scale) {
    require_shape(scale.num >= 1 && scale.den >= 1, "resize: scale must be positive");
    return (in_len * scale.num + scale.den - 1) / scale.den;  // ceil(in * scale)
}

ResampleAxis bicubic_axis(int64_t in_len, double scale, int64_t out_len) {
    require_shape(out_len >= 1, "resize: output dimension < 1");
    // Antialias: stretch the kernel by 1/scale when shrinking.
    const double kscale = scale < 1.0 ? scale : 1.0;
    const double width = 4.0 / kscale;
    const int64_t taps = static_cast<int64_t>(std::ceil(width)) + 2;

    ResampleAxis axis;
    axis.out_len = out_len;
    axis.taps = taps;
    axis.index.resize(static_cast<size_t>(out_len * taps));
    axis.weight.resize(static_cast<size_t>(out_len * taps));

    for (int64_t i = 0; i < out_len; ++i) {
        // Center of output pixel i in input coordinates.
        const double u = (static_cast<double>(i) + 0.5) / scale - 0.5;
        const int64_t left = static_cast<int64_t>(std::floor(u - width / 2.0)) + 1;
        double sum = 0.0;
        for (int64_t t = 0; t < taps; ++t) {
            const int64_t j = left + t;
            const double w = kscale * keys_cubic(kscale * (u - static_cast<double>(j)));
            axis.weight[static_cast<size_t>(i * taps + t)] = w;
            axis.index[static_cast<size_t>(i * taps + t)] = std::clamp<int64_t>(j, 0, in_len - 1);
            sum += w;
        }
        for (int64_t t = 0; t < taps; ++t) axis.weight[static_cast<size_t>(i * taps + t)] /= sum;
    }
    return axis;
}

namespace {

// Resamples along H for every (n, c) plane.
template <class S>
Tensor<S> resample_rows(const Tensor<S>& x, const ResampleAxis& axis) {
    Tensor<S> y(Shape(x.shape.n, x.shape.c, axis.out_len, x.shape.w));
    const int64_t planes = x.shape.n * x.shape.c;
    for (int64_t p = 0; p < planes; ++p) {
        const S* xp = &x.data[static_cast<size_t>(p * x.shape.h * x.shape.w)];
        S* yp = &y.data[static_cast<size_t>(p * y.shape.h * y.shape.w)];
        for (int64_t oy = 0; oy < axis.out_len; ++oy) {
            S* yrow = yp + oy * y.shape.w;
            for (int64_t ox = 0; ox < x.shape.w; ++ox) {
                double acc = 0.0;
                for (int64_t t = 0; t < axis.taps; ++t) {
                    const int64_t iy = axis.index[static_cast<size_t>(oy * axis.taps + t)];
                    acc += axis.weight[static_cast<size_t>(oy * axis.taps + t)] *
                           static_cast<double>(xp[iy * x.shape.w + ox]);
                }
                yrow[ox] = static_cast<S>(acc);
            }
        }
    }
    return y;
}

template <class S>
Tensor<S> resample_cols(const Tensor<S>& x, const ResampleAxis& axis) {
    Tensor<S> y(Shape(x.shape.n, x.shape.c, x.shape.h, axis.out_len));
    const int64_t planes = x.shape.n * x.shape.c;
    for (int64_t p = 0; p < planes; ++p) {
        const S* xp = &x.data[static_cast<size_t>(p * x.shape.h * x.shape.w)];
        S* yp = &y.data[static_cast<size_t>(p * y.shape.h * y.shape.w)];
        for (int64_t oy = 0; oy < x.shape.h; ++oy) {
            const S* xrow = xp + oy * x.shape.w;
            S* yrow = yp + oy * y.shape.w;
            for (int64_t ox = 0; ox < axis.out_len; ++ox) {
                double acc = 0.0;
                for (int64_t t = 0; t < axis.taps; ++t) {
                    const int64_t ix = axis.index[static_cast<size_t>(ox * axis.taps + t)];
                    acc += axis.weight[static_cast<size_t>(ox * axis.taps + t)] * static_cast<double>(xrow[ix]);
                }
                yrow[ox] = static_cast<S>(acc);
            }
        }
    }
    return y;
}

}  // namespace

template <class S>
Tensor<S> bicubic_resize(const Tensor<S>& img, Rational scale) {
    const double s = scale.value();
    const int64_t out_h = resize_out_len(img.shape.h, scale);
    const int64_t out_w = resize_out_len(img.shape.w, scale);
    const ResampleAxis rows = bicubic_axis(img.shape.h, s, out_h);
    const ResampleAxis cols = bicubic_axis(img.shape.w, s, out_w);
    return resample_cols(resample_rows(img, rows), cols);
}

template Tensor<float> bicubic_resize<float>(const Tensor<float>&, Rational);
template Tensor<double> bicubic_resize<double>(const Tensor<double>&, Rational);

}  // namespace rfbsr
