// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rfbsr/tensor.hpp"

namespace rfbsr {

/// How directory evaluation scores image pairs: metrics on the central
/// crop x crop window (skipped when crop <= 0), optionally after snapping both
/// images to 8-bit levels first.
struct EvalProtocol {
    int64_t crop = 1000;
    bool on_quantized = false;
    double psnr_cap = 100.0;
};

/// 10*log10(1/MSE) over all channels, capped (identical images report the cap
/// exactly). Inputs are [0,1] images of one shape.
template <class S>
double psnr(const Tensor<S>& a, const Tensor<S>& b, double cap = 100.0);

/// Structural similarity with the canonical settings: 11x11 Gaussian window,
/// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1. Computed per channel over
/// valid window positions (images must be at least 11x11), then averaged.
template <class S>
double ssim(const Tensor<S>& a, const Tensor<S>& b);

template <class S>
Tensor<S> center_crop(const Tensor<S>& x, int64_t ch, int64_t cw);

struct EvalRow {
    std::string name;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct EvalTable {
    std::vector<EvalRow> rows;  // sorted by filename
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;

    /// Comma-separated rows `filename,psnr_db,ssim` followed by a mean row.
    std::string csv() const;
};

/// Scores every SR image in `sr_dir` against the same-named file in `hr_dir`.
EvalTable evaluate(const std::filesystem::path& sr_dir, const std::filesystem::path& hr_dir,
                   const EvalProtocol& protocol);

}  // namespace rfbsr
