// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rfbsr/param.hpp"
#include "rfbsr/errors.hpp"

namespace rfbsr {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
};

/// Bias-corrected Adam bound to a fixed parameter set. step() consumes the
/// accumulated gradients and zeroes them afterwards; a non-finite gradient
/// aborts with the offending parameter named.
template <class S>
class AdamState {
public:
    AdamState() = default;
    AdamState(std::vector<Parameter<S>*> params, AdamConfig cfg = {}) : cfg_(cfg) {
        slots_.reserve(params.size());
        for (Parameter<S>* p : params) slots_.push_back(Slot{p, Tensor<S>(p->value.shape), Tensor<S>(p->value.shape)});
    }

    void step(double lr) {
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        const S b1 = static_cast<S>(cfg_.beta1), b2 = static_cast<S>(cfg_.beta2);
        for (Slot& s : slots_) {
            require_shape(s.p->grad.shape == s.p->value.shape, "adam: grad shape mismatch for " + s.p->name);
            for (size_t i = 0; i < s.p->value.data.size(); ++i) {
                const S g = s.p->grad.data[i];
                if (!std::isfinite(static_cast<double>(g)))
                    throw DivergenceError("adam: non-finite gradient in parameter " + s.p->name);
                s.m.data[i] = b1 * s.m.data[i] + (S(1) - b1) * g;
                s.v.data[i] = b2 * s.v.data[i] + (S(1) - b2) * g * g;
                const double mhat = static_cast<double>(s.m.data[i]) / bc1;
                const double vhat = static_cast<double>(s.v.data[i]) / bc2;
                s.p->value.data[i] -= static_cast<S>(lr * mhat / (std::sqrt(vhat) + cfg_.eps));
            }
            s.p->zero_grad();
        }
    }

    int64_t step_count() const { return t_; }

private:
    struct Slot {
        Parameter<S>* p;
        Tensor<S> m, v;
    };
    std::vector<Slot> slots_;
    AdamConfig cfg_;
    int64_t t_ = 0;
};

enum class Stage { psnr, gan };

/// Step-indexed learning rates of the two training stages.
/// psnr: 2e-4 halved every 250k steps (repeating without bound).
/// gan:  1e-4 halved at each of the fixed milestones.
struct LrSchedule {
    Stage kind = Stage::psnr;
    double base_lr = 2e-4;
    int64_t psnr_halflife = 250000;
    std::vector<int64_t> gan_milestones = {50000, 100000, 200000, 300000};

    static LrSchedule psnr_stage() { return LrSchedule{Stage::psnr, 2e-4}; }
    static LrSchedule gan_stage() { return LrSchedule{Stage::gan, 1e-4}; }
};

inline double lr_at(const LrSchedule& s, int64_t step) {
    if (step < 0) throw Error("lr_at: step must be >= 0");
    if (s.kind == Stage::psnr) {
        const int64_t halvings = step / s.psnr_halflife;
        return std::ldexp(s.base_lr, -static_cast<int>(halvings));
    }
    int64_t passed = 0;
    for (int64_t m : s.gan_milestones)
        if (step >= m) ++passed;
    return std::ldexp(s.base_lr, -static_cast<int>(passed));
}

}  // namespace rfbsr
