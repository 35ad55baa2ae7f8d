// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rfbsr/shape.hpp"

namespace rfbsr {

/// Dense 4-D array in NCHW layout, row-major (w fastest). The scalar type is
/// float for training and double for gradient-check mode. Tensors are plain
/// values: ops never mutate their inputs and always return fresh storage.
template <class S>
struct Tensor {
    Shape shape;
    std::vector<S> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), data(static_cast<size_t>(s.numel()), S(0)) {
        require_shape(s.valid(), "tensor shape must have all components >= 1, got " + s.str());
    }
    Tensor(Shape s, S fill) : shape(s), data(static_cast<size_t>(s.numel()), fill) {
        require_shape(s.valid(), "tensor shape must have all components >= 1, got " + s.str());
    }
    Tensor(Shape s, std::vector<S> values) : shape(s), data(std::move(values)) {
        require_shape(s.valid(), "tensor shape must have all components >= 1, got " + s.str());
        require_shape(static_cast<int64_t>(data.size()) == s.numel(),
                      "data length " + std::to_string(data.size()) + " does not match shape " + s.str());
    }

    int64_t numel() const { return shape.numel(); }

    S& at(int64_t n, int64_t c, int64_t h, int64_t w) {
        return data[static_cast<size_t>(((n * shape.c + c) * shape.h + h) * shape.w + w)];
    }
    S at(int64_t n, int64_t c, int64_t h, int64_t w) const {
        return data[static_cast<size_t>(((n * shape.c + c) * shape.h + h) * shape.w + w)];
    }

    /// Scalar tensors (shape (1,1,1,1)) carry loss values through the graph.
    bool is_scalar() const { return shape == Shape(1, 1, 1, 1); }
    S scalar() const {
        require_shape(is_scalar(), "expected scalar tensor, got " + shape.str());
        return data[0];
    }

    static Tensor scalar_of(S v) { return Tensor(Shape(1, 1, 1, 1), std::vector<S>{v}); }

    bool all_finite() const {
        for (S v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

template <class S>
Tensor<S> zeros_like(const Tensor<S>& t) {
    return Tensor<S>(t.shape);
}

/// Lossy only when narrowing double -> float; used by checkpoint and oracle code.
template <class To, class From>
Tensor<To> cast_tensor(const Tensor<From>& t) {
    Tensor<To> out(t.shape);
    for (size_t i = 0; i < t.data.size(); ++i) out.data[i] = static_cast<To>(t.data[i]);
    return out;
}

}  // namespace rfbsr
