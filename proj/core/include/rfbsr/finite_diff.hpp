// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "rfbsr/param.hpp"

namespace rfbsr {

/// Central-difference gradient oracle: (f(p+h) - f(p-h)) / 2h per element of
/// the parameter, where `f` re-evaluates the forward graph from scratch and
/// must not record anything. Independent of the tape by construction; meant
/// to run with S = double.
template <class S>
Tensor<S> finite_diff_grad(const std::function<S()>& f, Parameter<S>& p, S h) {
    Tensor<S> g(p.value.shape);
    for (size_t i = 0; i < p.value.data.size(); ++i) {
        const S saved = p.value.data[i];
        p.value.data[i] = saved + h;
        const S f_plus = f();
        p.value.data[i] = saved - h;
        const S f_minus = f();
        p.value.data[i] = saved;
        g.data[i] = (f_plus - f_minus) / (S(2) * h);
    }
    return g;
}

/// Same oracle restricted to a subset of elements; untouched entries stay 0.
/// Used for large blocks where probing every scalar would dominate runtime.
template <class S>
Tensor<S> finite_diff_grad_at(const std::function<S()>& f, Parameter<S>& p, S h,
                              const std::vector<size_t>& indices) {
    Tensor<S> g(p.value.shape);
    for (size_t i : indices) {
        const S saved = p.value.data[i];
        p.value.data[i] = saved + h;
        const S f_plus = f();
        p.value.data[i] = saved - h;
        const S f_minus = f();
        p.value.data[i] = saved;
        g.data[i] = (f_plus - f_minus) / (S(2) * h);
    }
    return g;
}

}  // namespace rfbsr
