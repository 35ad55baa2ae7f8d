// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Building blocks of the generator: dense blocks, RRDB, receptive-field
// blocks (RFB), RRFDB and the x2 upsampling stages. Every block works on both
// plain tensors (inference) and recorded values (training) through the same
// templated forward.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfbsr/rng.hpp"
#include "rfbsr/tape.hpp"

namespace rfbsr {

namespace detail {

template <class S>
Tensor<S> concat_ptrs(const std::vector<const Tensor<S>*>& xs) {
    return kernels::concat_channels(std::span<const Tensor<S>* const>(xs));
}

template <class S>
Rec<S> concat_ptrs(const std::vector<const Rec<S>*>& xs) {
    std::vector<Rec<S>> v;
    v.reserve(xs.size());
    for (const Rec<S>* p : xs) v.push_back(*p);
    return concat_channels(std::span<const Rec<S>>(v));
}

}  // namespace detail

/// One convolution with bias. Weights are Kaiming fan-in normal draws times
/// `gain` (generator convs use gain 0.1 to keep deep residual trunks stable);
/// biases start at zero.
template <class S>
struct ConvLayer {
    Parameter<S> weight;  // (c_out, c_in, kh, kw)
    Parameter<S> bias;    // (1, c_out, 1, 1)
    ConvSpec spec;

    ConvLayer() = default;
    ConvLayer(const std::string& name, int64_t c_in, int64_t c_out, int64_t kh, int64_t kw,
              const ConvSpec& spec_, Rng& rng, double gain)
        : spec(spec_) {
        Tensor<S> w(Shape(c_out, c_in, kh, kw));
        const double stddev = std::sqrt(2.0 / static_cast<double>(c_in * kh * kw));
        for (S& v : w.data) v = static_cast<S>(rng.normal(0.0, stddev) * gain);
        weight = Parameter<S>(name + ".weight", std::move(w));
        bias = Parameter<S>(name + ".bias", Tensor<S>(Shape(1, c_out, 1, 1)));
    }

    Tensor<S> forward(const Tensor<S>& x) { return conv2d(x, weight.value, &bias.value, spec); }
    Rec<S> forward(const Rec<S>& x) {
        return conv2d(x, x.tape->leaf(weight), std::optional<Rec<S>>(x.tape->leaf(bias)), spec);
    }

    int64_t in_channels() const { return weight.value.shape.c; }
    int64_t out_channels() const { return weight.value.shape.n; }

    void collect(std::vector<Parameter<S>*>& out) {
        out.push_back(&weight);
        out.push_back(&bias);
    }
};

/// Five 3x3 convolutions with dense connectivity: conv k sees the block input
/// concatenated with every earlier internal output, so its input width is
/// C + (k-1)*growth. The last conv maps back to C and feeds a scaled residual.
template <class S>
struct DenseBlock {
    std::vector<ConvLayer<S>> convs;
    S beta;
    S alpha;  // LeakyReLU slope on internal activations

    DenseBlock() = default;
    DenseBlock(const std::string& prefix, int64_t channels, int64_t growth, S beta_, S alpha_, Rng& rng,
               double gain)
        : beta(beta_), alpha(alpha_) {
        convs.reserve(5);
        for (int k = 0; k < 5; ++k) {
            const int64_t c_in = channels + k * growth;
            const int64_t c_out = (k == 4) ? channels : growth;
            convs.emplace_back(prefix + ".conv" + std::to_string(k + 1), c_in, c_out, 3, 3,
                               same_pad_spec(3, 3), rng, gain);
        }
    }

    template <class V>
    V forward(const V& x) {
        std::vector<V> ys;
        ys.reserve(convs.size());
        std::vector<const V*> feats{&x};
        for (size_t k = 0; k < convs.size(); ++k) {
            V y = feats.size() == 1 ? convs[k].forward(x) : convs[k].forward(detail::concat_ptrs(feats));
            if (k + 1 < convs.size()) y = leaky_relu(y, alpha);
            ys.push_back(std::move(y));
            feats.push_back(&ys.back());
        }
        return add(x, scale(ys.back(), beta));
    }

    void collect(std::vector<Parameter<S>*>& out) {
        for (auto& c : convs) c.collect(out);
    }
};

/// Residual-in-residual dense block: three dense blocks inside one scaled
/// outer residual.
template <class S>
struct Rrdb {
    std::vector<DenseBlock<S>> dense;
    S beta;

    Rrdb() = default;
    Rrdb(const std::string& prefix, int64_t channels, int64_t growth, S beta_, S alpha, Rng& rng, double gain)
        : beta(beta_) {
        dense.reserve(3);
        for (int k = 0; k < 3; ++k)
            dense.emplace_back(prefix + ".dense" + std::to_string(k + 1), channels, growth, beta_, alpha, rng,
                               gain);
    }

    template <class V>
    V forward(const V& x) {
        V y = dense[0].forward(x);
        y = dense[1].forward(y);
        y = dense[2].forward(y);
        return add(x, scale(y, beta));
    }

    void collect(std::vector<Parameter<S>*>& out) {
        for (auto& d : dense) d.collect(out);
    }
};

/// Kernel sequence of one RFB branch; every entry is same-padded.
struct RfbBranchStep {
    int64_t kh, kw, dil;
};

/// Four-branch layout built only from {1x1, 1x3, 3x1, dilated 3x3} kernels.
/// Branch width is c_in / 4. The dilated tails give the branches increasing
/// receptive fields (3, 9, 9, 13 pixels along the widest axis).
inline std::vector<std::vector<RfbBranchStep>> default_rfb_branches() {
    return {
        {{1, 1, 1}, {3, 3, 1}},
        {{1, 1, 1}, {1, 3, 1}, {3, 3, 3}},
        {{1, 1, 1}, {3, 1, 1}, {3, 3, 3}},
        {{1, 1, 1}, {1, 3, 1}, {3, 1, 1}, {3, 3, 5}},
    };
}

/// Receptive-field block: parallel small-kernel branches (ReLU inside), a 1x1
/// linear fusion over their concat, an identity (or 1x1) shortcut, and a
/// LeakyReLU on the residual sum. No normalization layers anywhere.
template <class S>
struct Rfb {
    std::vector<std::vector<ConvLayer<S>>> branches;
    ConvLayer<S> fuse;
    std::optional<ConvLayer<S>> shortcut;  // only when c_in != c_out
    S residual_scale;
    S alpha;

    Rfb() = default;
    Rfb(const std::string& prefix, int64_t c_in, int64_t c_out, S residual_scale_, S alpha_, Rng& rng,
        double gain, const std::vector<std::vector<RfbBranchStep>>& layout = default_rfb_branches())
        : residual_scale(residual_scale_), alpha(alpha_) {
        require_shape(c_in % 4 == 0, "rfb: input channels must be divisible by 4, got " + std::to_string(c_in));
        const int64_t inter = c_in / 4;
        branches.reserve(layout.size());
        for (size_t b = 0; b < layout.size(); ++b) {
            std::vector<ConvLayer<S>> chain;
            chain.reserve(layout[b].size());
            int64_t c_prev = c_in;
            for (size_t k = 0; k < layout[b].size(); ++k) {
                const auto& st = layout[b][k];
                chain.emplace_back(prefix + ".branch" + std::to_string(b) + ".conv" + std::to_string(k),
                                   c_prev, inter, st.kh, st.kw, same_pad_spec(st.kh, st.kw, st.dil, st.dil),
                                   rng, gain);
                c_prev = inter;
            }
            branches.push_back(std::move(chain));
        }
        fuse = ConvLayer<S>(prefix + ".fuse", inter * static_cast<int64_t>(layout.size()), c_out, 1, 1,
                            ConvSpec{}, rng, gain);
        if (c_in != c_out)
            shortcut = ConvLayer<S>(prefix + ".shortcut", c_in, c_out, 1, 1, ConvSpec{}, rng, gain);
    }

    template <class V>
    V forward(const V& x) {
        std::vector<V> outs;
        outs.reserve(branches.size());
        for (auto& chain : branches) {
            V y = relu(chain[0].forward(x));
            for (size_t k = 1; k < chain.size(); ++k) y = relu(chain[k].forward(y));
            outs.push_back(std::move(y));
        }
        std::vector<const V*> ptrs;
        ptrs.reserve(outs.size());
        for (const V& o : outs) ptrs.push_back(&o);
        V fused = fuse.forward(detail::concat_ptrs(ptrs));
        V sum = shortcut ? add(shortcut->forward(x), scale(fused, residual_scale))
                         : add(x, scale(fused, residual_scale));
        return leaky_relu(sum, alpha);
    }

    void collect(std::vector<Parameter<S>*>& out) {
        for (auto& chain : branches)
            for (auto& c : chain) c.collect(out);
        fuse.collect(out);
        if (shortcut) shortcut->collect(out);
    }
};

/// RRFDB: RFBs wired densely like a DenseBlock (RFB k consumes the block input
/// concatenated with all previous RFB outputs), inside a scaled outer residual.
template <class S>
struct Rrfdb {
    std::vector<Rfb<S>> rfbs;
    S beta;

    Rrfdb() = default;
    Rrfdb(const std::string& prefix, int64_t channels, int64_t growth, int64_t n_rfb, S beta_,
          S rfb_residual_scale, S alpha, Rng& rng, double gain)
        : beta(beta_) {
        require_shape(n_rfb >= 1, "rrfdb: needs at least one rfb");
        rfbs.reserve(static_cast<size_t>(n_rfb));
        for (int64_t k = 0; k < n_rfb; ++k) {
            const int64_t c_in = channels + k * growth;
            const int64_t c_out = (k == n_rfb - 1) ? channels : growth;
            rfbs.emplace_back(prefix + ".rfb" + std::to_string(k + 1), c_in, c_out, rfb_residual_scale, alpha,
                              rng, gain);
        }
    }

    template <class V>
    V forward(const V& x) {
        std::vector<V> ys;
        ys.reserve(rfbs.size());
        std::vector<const V*> feats{&x};
        for (size_t k = 0; k < rfbs.size(); ++k) {
            V y = feats.size() == 1 ? rfbs[k].forward(x) : rfbs[k].forward(detail::concat_ptrs(feats));
            ys.push_back(std::move(y));
            feats.push_back(&ys.back());
        }
        return add(x, scale(ys.back(), beta));
    }

    void collect(std::vector<Parameter<S>*>& out) {
        for (auto& r : rfbs) r.collect(out);
    }
};

enum class UpsampleKind { nni, spc };

/// One x2 upsampling stage. NNI: nearest-neighbour replication. SPC: a 3x3
/// conv expanding C -> 4C followed by a pixel shuffle. Either kind may carry a
/// trailing RFB that mixes the upsampled features (the default); the bare
/// variants exist so a plan without per-stage RFBs is also constructible.
template <class S>
struct UpsampleStage {
    UpsampleKind kind = UpsampleKind::nni;
    std::optional<ConvLayer<S>> expand;  // spc only
    std::optional<Rfb<S>> rfb;

    UpsampleStage() = default;
    UpsampleStage(const std::string& prefix, UpsampleKind kind_, bool with_rfb, int64_t channels,
                  S rfb_residual_scale, S alpha, Rng& rng, double gain)
        : kind(kind_) {
        if (kind == UpsampleKind::spc)
            expand = ConvLayer<S>(prefix + ".expand", channels, channels * 4, 3, 3, same_pad_spec(3, 3), rng,
                                  gain);
        if (with_rfb)
            rfb = Rfb<S>(prefix + ".rfb", channels, channels, rfb_residual_scale, alpha, rng, gain);
    }

    template <class V>
    V forward(const V& x) {
        V y = kind == UpsampleKind::nni ? nearest_upsample(x, 2) : pixel_shuffle(expand->forward(x), 2);
        if (rfb) y = rfb->forward(y);
        return y;
    }

    void collect(std::vector<Parameter<S>*>& out) {
        if (expand) expand->collect(out);
        if (rfb) rfb->collect(out);
    }
};

}  // namespace rfbsr
