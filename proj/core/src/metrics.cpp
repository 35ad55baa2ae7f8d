// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "rfbsr/errors.hpp"
#include "rfbsr/image_io.hpp"

namespace rfbsr {

template <class S>
double psnr(const Tensor<S>& a, const Tensor<S>& b, double cap) {
    require_shape(a.shape == b.shape, "psnr: shape mismatch " + a.shape.str() + " vs " + b.shape.str());
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.numel());
    if (mse == 0.0) return cap;
    return std::min(10.0 * std::log10(1.0 / mse), cap);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
constexpr double kSsimC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
    std::vector<double> w(kSsimWindow);
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = static_cast<double>(i - half);
        w[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += w[static_cast<size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable valid-mode Gaussian filter of one (h, w) plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int64_t h, int64_t w,
                                 const std::vector<double>& win) {
    const int64_t k = kSsimWindow;
    const int64_t oh = h - k + 1, ow = w - k + 1;
    std::vector<double> rows(static_cast<size_t>(h * ow));
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int64_t t = 0; t < k; ++t) acc += win[static_cast<size_t>(t)] * plane[static_cast<size_t>(y * w + x + t)];
            rows[static_cast<size_t>(y * ow + x)] = acc;
        }
    std::vector<double> out(static_cast<size_t>(oh * ow));
    for (int64_t y = 0; y < oh; ++y)
        for (int64_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int64_t t = 0; t < k; ++t) acc += win[static_cast<size_t>(t)] * rows[static_cast<size_t>((y + t) * ow + x)];
            out[static_cast<size_t>(y * ow + x)] = acc;
        }
    return out;
}

}  // namespace

template <class S>
double ssim(const Tensor<S>& a, const Tensor<S>& b) {
    require_shape(a.shape == b.shape, "ssim: shape mismatch " + a.shape.str() + " vs " + b.shape.str());
    require_shape(a.shape.h >= kSsimWindow && a.shape.w >= kSsimWindow,
                  "ssim: image smaller than the 11x11 window");
    const std::vector<double> win = gaussian_window();
    const int64_t h = a.shape.h, w = a.shape.w, plane = h * w;

    double total = 0.0;
    int64_t n_channels = 0;
    for (int64_t n = 0; n < a.shape.n; ++n) {
        for (int64_t c = 0; c < a.shape.c; ++c) {
            std::vector<double> pa(static_cast<size_t>(plane)), pb(static_cast<size_t>(plane));
            std::vector<double> paa(static_cast<size_t>(plane)), pbb(static_cast<size_t>(plane)),
                pab(static_cast<size_t>(plane));
            const size_t base = static_cast<size_t>((n * a.shape.c + c) * plane);
            for (int64_t i = 0; i < plane; ++i) {
                const double va = static_cast<double>(a.data[base + static_cast<size_t>(i)]);
                const double vb = static_cast<double>(b.data[base + static_cast<size_t>(i)]);
                pa[static_cast<size_t>(i)] = va;
                pb[static_cast<size_t>(i)] = vb;
                paa[static_cast<size_t>(i)] = va * va;
                pbb[static_cast<size_t>(i)] = vb * vb;
                pab[static_cast<size_t>(i)] = va * vb;
            }
            const auto mu_a = filter_valid(pa, h, w, win);
            const auto mu_b = filter_valid(pb, h, w, win);
            const auto m_aa = filter_valid(paa, h, w, win);
            const auto m_bb = filter_valid(pbb, h, w, win);
            const auto m_ab = filter_valid(pab, h, w, win);

            double acc = 0.0;
            for (size_t i = 0; i < mu_a.size(); ++i) {
                const double ma = mu_a[i], mb = mu_b[i];
                const double va = m_aa[i] - ma * ma;
                const double vb = m_bb[i] - mb * mb;
                const double cov = m_ab[i] - ma * mb;
                acc += ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
                       ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
            }
            total += acc / static_cast<double>(mu_a.size());
            ++n_channels;
        }
    }
    return total / static_cast<double>(n_channels);
}

template <class S>
Tensor<S> center_crop(const Tensor<S>& x, int64_t ch, int64_t cw) {
    require_shape(ch >= 1 && cw >= 1 && ch <= x.shape.h && cw <= x.shape.w,
                  "center_crop: crop " + std::to_string(ch) + "x" + std::to_string(cw) +
                      " does not fit inside " + x.shape.str());
    const int64_t y0 = (x.shape.h - ch) / 2;
    const int64_t x0 = (x.shape.w - cw) / 2;
    Tensor<S> y(Shape(x.shape.n, x.shape.c, ch, cw));
    for (int64_t n = 0; n < x.shape.n; ++n)
        for (int64_t c = 0; c < x.shape.c; ++c)
            for (int64_t i = 0; i < ch; ++i) {
                const S* src = &x.data[static_cast<size_t>(((n * x.shape.c + c) * x.shape.h + y0 + i) * x.shape.w + x0)];
                S* dst = &y.data[static_cast<size_t>(((n * y.shape.c + c) * ch + i) * cw)];
                std::copy_n(src, cw, dst);
            }
    return y;
}

template double psnr<float>(const Tensor<float>&, const Tensor<float>&, double);
template double psnr<double>(const Tensor<double>&, const Tensor<double>&, double);
template double ssim<float>(const Tensor<float>&, const Tensor<float>&);
template double ssim<double>(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> center_crop<float>(const Tensor<float>&, int64_t, int64_t);
template Tensor<double> center_crop<double>(const Tensor<double>&, int64_t, int64_t);

std::string EvalTable::csv() const {
    std::string out = "filename,psnr_db,ssim\n";
    char line[256];
    for (const EvalRow& r : rows) {
        std::snprintf(line, sizeof(line), "%s,%.6f,%.6f\n", r.name.c_str(), r.psnr_db, r.ssim);
        out += line;
    }
    std::snprintf(line, sizeof(line), "mean,%.6f,%.6f\n", mean_psnr, mean_ssim);
    out += line;
    return out;
}

namespace {

std::map<std::string, std::filesystem::path> list_images(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::map<std::string, std::filesystem::path> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file() || !image_extension_supported(entry.path())) continue;
        out.emplace(std::filesystem::relative(entry.path(), dir).generic_string(), entry.path());
    }
    return out;
}

}  // namespace

EvalTable evaluate(const std::filesystem::path& sr_dir, const std::filesystem::path& hr_dir,
                   const EvalProtocol& protocol) {
    const auto sr_files = list_images(sr_dir);
    const auto hr_files = list_images(hr_dir);
    for (const auto& [name, _] : sr_files)
        if (!hr_files.count(name)) throw IoError("missing reference image for " + name);
    for (const auto& [name, _] : hr_files)
        if (!sr_files.count(name)) throw IoError("missing result image for " + name);
    if (sr_files.empty()) throw IoError("no images found in " + sr_dir.string());

    EvalTable table;
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (const auto& [name, sr_path] : sr_files) {
        Tensor<float> sr = load_image(sr_path);
        Tensor<float> hr = load_image(hr_files.at(name));
        require_shape(sr.shape == hr.shape,
                      "evaluate: size mismatch for " + name + ": " + sr.shape.str() + " vs " + hr.shape.str());
        if (protocol.on_quantized) {
            sr = quantize_8bit(sr);
            hr = quantize_8bit(hr);
        }
        if (protocol.crop > 0) {
            sr = center_crop(sr, protocol.crop, protocol.crop);
            hr = center_crop(hr, protocol.crop, protocol.crop);
        }
        EvalRow row{name, psnr(sr, hr, protocol.psnr_cap), ssim(sr, hr)};
        psnr_sum += row.psnr_db;
        ssim_sum += row.ssim;
        table.rows.push_back(std::move(row));
    }
    table.mean_psnr = psnr_sum / static_cast<double>(table.rows.size());
    table.mean_ssim = ssim_sum / static_cast<double>(table.rows.size());
    return table;
}

}  // namespace rfbsr
