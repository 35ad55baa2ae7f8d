// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "rfbsr/tensor.hpp"

namespace rfbsr {

/// Exact resize ratio, e.g. {1,16} for the x16 degradation.
struct Rational {
    int64_t num = 1;
    int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Keys cubic kernel, a = -0.5. u(0) = 1, u(1) = u(2) = 0, u(0.5) = 0.5625.
double keys_cubic(double x, double a = -0.5);

/// Precomputed sampling weights of one output axis: for output index i, the
/// taps are input indices first[i] .. first[i]+taps-1 (clamped to the border,
/// i.e. replicate edge handling) with weights summing to 1.
struct ResampleAxis {
    int64_t out_len = 0;
    int64_t taps = 0;
    std::vector<int64_t> index;    // out_len * taps, clamped
    std::vector<double> weight;    // out_len * taps, renormalized per output pixel
};

/// Weights for one axis. When scale < 1 the kernel is stretched by 1/scale
/// (antialiasing), matching the default behaviour of the usual `imresize`.
ResampleAxis bicubic_axis(int64_t in_len, double scale, int64_t out_len);

/// Output length convention: ceil(in * scale).
int64_t resize_out_len(int64_t in_len, Rational scale);

/// Separable two-pass resize (rows, then columns); accumulation in double.
template <class S>
Tensor<S> bicubic_resize(const Tensor<S>& img, Rational scale);

}  // namespace rfbsr
