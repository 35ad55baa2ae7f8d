// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "rfbsr/tensor.hpp"

namespace rfbsr {

/// A named trainable tensor. `name` is a hierarchical dotted path (for example
/// trunk_a.rrdb03.dense1.conv2.weight) and is the key space of checkpoints.
/// Gradients accumulate across backward passes until zero_grad().
template <class S>
struct Parameter {
    Tensor<S> value;
    Tensor<S> grad;
    std::string name;
    bool trainable = true;

    Parameter() = default;
    Parameter(std::string name_, Tensor<S> v)
        : value(std::move(v)), grad(value.shape), name(std::move(name_)) {}

    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), S(0)); }
};

}  // namespace rfbsr
