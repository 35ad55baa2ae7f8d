// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Loss algebra of the adversarial trainer: pixel L1, frozen-extractor feature
// L1, relativistic sigmoid deltas, the generator objective
// l_g = lambda*l_pix + l_feat + eta*l_adv and the discriminator objective
// l_d = l_real + l_fake. All reductions are per-batch means.

#pragma once

#include <cmath>

#include "rfbsr/networks.hpp"

namespace rfbsr {

namespace detail {
template <class T>
struct scalar_of;
template <class S>
struct scalar_of<Tensor<S>> {
    using type = S;
};
template <class S>
struct scalar_of<Rec<S>> {
    using type = S;
};
template <class T>
using scalar_of_t = typename scalar_of<T>::type;
}  // namespace detail

struct LossWeights {
    double lambda = 10.0;  // pixel term
    double eta = 5e-3;     // adversarial term

    void validate() const {
        if (lambda < 0.0 || eta < 0.0) throw ConfigError("loss weights must be >= 0");
    }
};

/// Per-step scalar decomposition, logged once per training iteration.
struct LossReport {
    double l_pix = 0.0;
    double l_feat = 0.0;
    double l_adv = 0.0;
    double l_g = 0.0;
    double l_real = 0.0;
    double l_fake = 0.0;
    double l_d = 0.0;
    double delta_real_mean = 0.5;
    double delta_fake_mean = 0.5;

    bool finite() const {
        return std::isfinite(l_pix) && std::isfinite(l_feat) && std::isfinite(l_adv) && std::isfinite(l_g) &&
               std::isfinite(l_real) && std::isfinite(l_fake) && std::isfinite(l_d);
    }

    /// l_g must equal lambda*l_pix + l_feat + eta*l_adv and l_d must equal
    /// l_real + l_fake, both to 1e-6 relative.
    bool identities_hold(const LossWeights& w, double rel_tol = 1e-6) const {
        const double g = w.lambda * l_pix + l_feat + w.eta * l_adv;
        const double d = l_real + l_fake;
        const auto close = [rel_tol](double a, double b) {
            return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
        };
        return close(l_g, g) && close(l_d, d);
    }
};

/// Mean absolute difference; the training estimator is a per-batch mean, with
/// dataset-level constants folded into the loss weights.
template <class V>
V pixel_loss(const V& sr, const V& hr) {
    return l1(sr, hr);
}

/// Feature-space L1 against a frozen extractor. Only `sr` receives gradient:
/// the reference features are computed outside the tape.
template <class S>
Tensor<S> feature_loss(FeatureExtractor<S>& f, const Tensor<S>& sr, const Tensor<S>& hr) {
    return l1(f.forward(sr), f.forward(hr));
}

template <class S>
Rec<S> feature_loss(FeatureExtractor<S>& f, Rec<S> sr, const Tensor<S>& hr) {
    Tensor<S> ref = f.forward(hr);
    return l1(f.forward(sr), sr.tape->constant(std::move(ref)));
}

template <class V>
struct Deltas {
    V real;  // sigma(d_hr[i] - mean(d_sr))
    V fake;  // sigma(d_sr[i] - mean(d_hr))
};

/// Relativistic realness deltas over per-image logits of shape (n,1,1,1).
template <class V>
Deltas<V> relativistic_deltas(const V& d_hr, const V& d_sr) {
    return {sigmoid(sub_scalar(d_hr, mean_all(d_sr))), sigmoid(sub_scalar(d_sr, mean_all(d_hr)))};
}

/// -E[log(1 - delta_real)] - E[log(delta_fake)]
template <class V>
V adversarial_loss_g(const V& delta_real, const V& delta_fake) {
    using S = detail::scalar_of_t<V>;
    V t1 = mean_all(log_clamped(affine(delta_real, S(-1), S(1))));
    V t2 = mean_all(log_clamped(delta_fake));
    return scale(add(t1, t2), S(-1));
}

template <class V>
struct DiscriminatorLoss {
    V real;
    V fake;
    V total;
};

/// l_real = -E[log(delta_real)]; l_fake = -E[log(1 - delta_fake)] by default.
/// `fake_literal_paper` switches the fake term to -E[1 - log(delta_fake)]
/// (= E[log(delta_fake)] - 1) for comparison runs; it is unbounded below and
/// not used by default.
template <class V>
DiscriminatorLoss<V> discriminator_loss(const V& delta_real, const V& delta_fake,
                                        bool fake_literal_paper = false) {
    using S = detail::scalar_of_t<V>;
    V l_real = scale(mean_all(log_clamped(delta_real)), S(-1));
    V l_fake = fake_literal_paper
                   ? mean_all(affine(log_clamped(delta_fake), S(1), S(-1)))
                   : scale(mean_all(log_clamped(affine(delta_fake, S(-1), S(1)))), S(-1));
    return {l_real, l_fake, add(l_real, l_fake)};
}

/// l_g = lambda*l_pix + l_feat + eta*l_adv
template <class V>
V generator_loss(const LossWeights& w, const V& l_pix, const V& l_feat, const V& l_adv) {
    using S = detail::scalar_of_t<V>;
    return add(add(scale(l_pix, static_cast<S>(w.lambda)), l_feat), scale(l_adv, static_cast<S>(w.eta)));
}

}  // namespace rfbsr
