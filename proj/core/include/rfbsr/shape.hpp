// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "rfbsr/errors.hpp"

namespace rfbsr {

/// NCHW extent of a 4-D tensor. All components are >= 1 for a valid shape.
struct Shape {
    int64_t n = 0;
    int64_t c = 0;
    int64_t h = 0;
    int64_t w = 0;

    constexpr Shape() = default;
    constexpr Shape(int64_t n_, int64_t c_, int64_t h_, int64_t w_) : n(n_), c(c_), h(h_), w(w_) {}

    constexpr int64_t numel() const { return n * c * h * w; }
    constexpr bool valid() const { return n >= 1 && c >= 1 && h >= 1 && w >= 1; }

    constexpr bool operator==(const Shape&) const = default;

    std::string str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }
};

inline void require_shape(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}

}  // namespace rfbsr
