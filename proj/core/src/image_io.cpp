// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include <png.h>

#include "rfbsr/errors.hpp"

namespace rfbsr {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
    std::string e = path.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

Tensor<float> from_rgb8(const std::vector<uint8_t>& rgb, int64_t h, int64_t w) {
    Tensor<float> img(Shape(1, 3, h, w));
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x)
            for (int64_t c = 0; c < 3; ++c)
                img.at(0, c, y, x) = static_cast<float>(rgb[static_cast<size_t>((y * w + x) * 3 + c)]) / 255.0f;
    return img;
}

std::vector<uint8_t> to_rgb8(const Tensor<float>& img) {
    require_shape(img.shape.n == 1 && img.shape.c == 3, "save_image: expected shape (1,3,h,w), got " +
                                                            img.shape.str());
    const int64_t h = img.shape.h, w = img.shape.w;
    std::vector<uint8_t> rgb(static_cast<size_t>(h * w * 3));
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x)
            for (int64_t c = 0; c < 3; ++c) {
                const double v = std::clamp(static_cast<double>(img.at(0, c, y, x)), 0.0, 1.0);
                rgb[static_cast<size_t>((y * w + x) * 3 + c)] =
                    static_cast<uint8_t>(std::lround(v * 255.0));
            }
    return rgb;
}

// -- PPM (P6, maxval 255) ----------------------------------------------------

Tensor<float> load_ppm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open image: " + path.string());
    std::string magic;
    is >> magic;
    if (magic != "P6") throw IoError("not a P6 ppm (non-RGB inputs are rejected): " + path.string());
    auto next_token = [&is, &path]() {
        // Skips whitespace and '#' comment lines between header fields.
        std::string tok;
        char c;
        while (is.get(c)) {
            if (c == '#') {
                std::string line;
                std::getline(is, line);
                continue;
            }
            if (!std::isspace(static_cast<unsigned char>(c))) {
                tok.push_back(c);
                while (is.get(c) && !std::isspace(static_cast<unsigned char>(c))) tok.push_back(c);
                return tok;
            }
        }
        throw IoError("truncated ppm header: " + path.string());
    };
    const int64_t w = std::stoll(next_token());
    const int64_t h = std::stoll(next_token());
    const int64_t maxval = std::stoll(next_token());
    if (w < 1 || h < 1) throw IoError("bad ppm dimensions: " + path.string());
    if (maxval != 255) throw IoError("only 8-bit ppm supported: " + path.string());
    std::vector<uint8_t> rgb(static_cast<size_t>(w * h * 3));
    is.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (is.gcount() != static_cast<std::streamsize>(rgb.size()))
        throw IoError("truncated ppm payload: " + path.string());
    return from_rgb8(rgb, h, w);
}

void save_ppm(const Tensor<float>& img, const std::filesystem::path& path) {
    const std::vector<uint8_t> rgb = to_rgb8(img);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << "P6\n" << img.shape.w << " " << img.shape.h << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!os) throw IoError("write failed: " + path.string());
}

// -- PNG (8-bit RGB) -----------------------------------------------------------

struct PngCloser {
    FILE* f = nullptr;
    ~PngCloser() {
        if (f) std::fclose(f);
    }
};

Tensor<float> load_png(const std::filesystem::path& path) {
    PngCloser file;
    file.f = std::fopen(path.string().c_str(), "rb");
    if (!file.f) throw IoError("cannot open image: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png decode failed: " + path.string());
    }
    png_init_io(png, file.f);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_RGB || depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("only 8-bit RGB png supported (no silent conversion): " + path.string());
    }
    std::vector<uint8_t> rgb(static_cast<size_t>(w) * h * 3);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = rgb.data() + static_cast<size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return from_rgb8(rgb, static_cast<int64_t>(h), static_cast<int64_t>(w));
}

void save_png(const Tensor<float>& img, const std::filesystem::path& path) {
    const std::vector<uint8_t> rgb = to_rgb8(img);
    const int64_t h = img.shape.h, w = img.shape.w;

    PngCloser file;
    file.f = std::fopen(path.string().c_str(), "wb");
    if (!file.f) throw IoError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png encode failed: " + path.string());
    }
    png_init_io(png, file.f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(static_cast<size_t>(h));
    for (int64_t y = 0; y < h; ++y)
        rows[static_cast<size_t>(y)] = const_cast<png_bytep>(rgb.data() + y * w * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

bool image_extension_supported(const std::filesystem::path& path) {
    const std::string e = lower_ext(path);
    return e == ".png" || e == ".ppm";
}

Tensor<float> load_image(const std::filesystem::path& path) {
    const std::string e = lower_ext(path);
    if (e == ".ppm") return load_ppm(path);
    if (e == ".png") return load_png(path);
    throw IoError("unsupported image format '" + e + "': " + path.string());
}

void save_image(const Tensor<float>& img, const std::filesystem::path& path) {
    const std::string e = lower_ext(path);
    if (e == ".ppm") return save_ppm(img, path);
    if (e == ".png") return save_png(img, path);
    throw IoError("unsupported image format '" + e + "': " + path.string());
}

template <class S>
Tensor<S> quantize_8bit(const Tensor<S>& img) {
    Tensor<S> out(img.shape);
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp(static_cast<double>(img.data[i]), 0.0, 1.0);
        out.data[i] = static_cast<S>(std::lround(v * 255.0) / 255.0);
    }
    return out;
}

template Tensor<float> quantize_8bit<float>(const Tensor<float>&);
template Tensor<double> quantize_8bit<double>(const Tensor<double>&);

}  // namespace rfbsr
