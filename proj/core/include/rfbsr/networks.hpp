// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rfbsr/blocks.hpp"

namespace rfbsr {

struct UpsampleStageSpec {
    UpsampleKind kind = UpsampleKind::nni;
    bool with_rfb = true;

    bool operator==(const UpsampleStageSpec&) const = default;
};

inline std::vector<UpsampleStageSpec> default_upsample_plan(int64_t n_stages = 4) {
    std::vector<UpsampleStageSpec> plan;
    for (int64_t i = 0; i < n_stages; ++i)
        plan.push_back({i % 2 == 0 ? UpsampleKind::nni : UpsampleKind::spc, true});
    return plan;
}

/// Architecture of the generator. `scale` must equal the product of the stage
/// factors (every stage doubles, so scale == 2^plan.size()).
struct GeneratorConfig {
    int64_t n_rrdb = 16;
    int64_t n_rrfdb = 8;
    int64_t rfb_per_rrfdb = 5;
    int64_t base_channels = 64;
    int64_t growth = 32;
    int64_t scale = 16;
    std::vector<UpsampleStageSpec> upsample_plan = default_upsample_plan();
    double residual_scale = 0.2;      // beta of dense/RRDB/RRFDB residuals
    double rfb_residual_scale = 1.0;  // s of the RFB fusion residual
    double lrelu_alpha = 0.2;
    int64_t in_channels = 3;
    int64_t out_channels = 3;

    void validate() const {
        if (n_rrdb < 1 || n_rrfdb < 1 || rfb_per_rrfdb < 1)
            throw ConfigError("generator: block counts must be >= 1");
        if (base_channels < 4 || growth < 1) throw ConfigError("generator: channels too small");
        int64_t product = 1;
        for (size_t i = 0; i < upsample_plan.size(); ++i) product *= 2;
        if (product != scale)
            throw ConfigError("generator: scale " + std::to_string(scale) +
                              " does not equal the upsample stage product " + std::to_string(product));
        if (lrelu_alpha <= 0.0 || lrelu_alpha >= 1.0) throw ConfigError("generator: lrelu_alpha must be in (0,1)");
        // RFB branch width is c_in/4, so every RFB input width must divide by 4.
        for (int64_t k = 0; k < rfb_per_rrfdb; ++k)
            if ((base_channels + k * growth) % 4 != 0)
                throw ConfigError("generator: RFB input width " + std::to_string(base_channels + k * growth) +
                                  " not divisible by 4 (adjust base_channels/growth)");
    }

    bool operator==(const GeneratorConfig&) const = default;
};

namespace detail {

template <class S>
std::map<std::string, Parameter<S>*> name_map(const std::vector<Parameter<S>*>& params) {
    std::map<std::string, Parameter<S>*> m;
    for (Parameter<S>* p : params) {
        auto [it, inserted] = m.emplace(p->name, p);
        if (!inserted) throw Error("duplicate parameter name: " + p->name);
    }
    return m;
}

}  // namespace detail

/// The full generator: first conv, Trunk-a of RRDBs, Trunk-RFB of RRFDBs, one
/// RFB ahead of the upsampling chain, the x2 stages, and two final 3x3 convs
/// (LeakyReLU between them, linear output).
template <class S>
class Generator {
public:
    Generator(const GeneratorConfig& cfg, uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        Rng rng = Rng::derive(seed, "generator");
        const double gain = 0.1;  // post-init damping of all generator convs
        const S beta = static_cast<S>(cfg_.residual_scale);
        const S rfb_s = static_cast<S>(cfg_.rfb_residual_scale);
        const S alpha = static_cast<S>(cfg_.lrelu_alpha);
        const int64_t c = cfg_.base_channels;

        first_conv_ = ConvLayer<S>("first_conv", cfg_.in_channels, c, 3, 3, same_pad_spec(3, 3), rng, gain);
        trunk_a_.reserve(static_cast<size_t>(cfg_.n_rrdb));
        for (int64_t i = 0; i < cfg_.n_rrdb; ++i)
            trunk_a_.emplace_back("trunk_a.rrdb" + two_digits(i), c, cfg_.growth, beta, alpha, rng, gain);
        trunk_rfb_.reserve(static_cast<size_t>(cfg_.n_rrfdb));
        for (int64_t i = 0; i < cfg_.n_rrfdb; ++i)
            trunk_rfb_.emplace_back("trunk_rfb.rrfdb" + two_digits(i), c, cfg_.growth, cfg_.rfb_per_rrfdb,
                                    beta, rfb_s, alpha, rng, gain);
        pre_upsample_rfb_ = Rfb<S>("pre_up.rfb", c, c, rfb_s, alpha, rng, gain);
        stages_.reserve(cfg_.upsample_plan.size());
        for (size_t i = 0; i < cfg_.upsample_plan.size(); ++i) {
            const auto& sp = cfg_.upsample_plan[i];
            stages_.emplace_back("upsample.stage" + std::to_string(i), sp.kind, sp.with_rfb, c, rfb_s, alpha,
                                 rng, gain);
        }
        final_conv1_ = ConvLayer<S>("final_conv1", c, c, 3, 3, same_pad_spec(3, 3), rng, gain);
        final_conv2_ = ConvLayer<S>("final_conv2", c, cfg_.out_channels, 3, 3, same_pad_spec(3, 3), rng, gain);
    }

    template <class V>
    V forward(const V& x) {
        V y = first_conv_.forward(x);
        for (auto& b : trunk_a_) y = b.forward(y);
        for (auto& b : trunk_rfb_) y = b.forward(y);
        y = pre_upsample_rfb_.forward(y);
        for (auto& s : stages_) y = s.forward(y);
        y = leaky_relu(final_conv1_.forward(y), static_cast<S>(cfg_.lrelu_alpha));
        return final_conv2_.forward(y);
    }

    std::vector<Parameter<S>*> parameters() {
        std::vector<Parameter<S>*> out;
        first_conv_.collect(out);
        for (auto& b : trunk_a_) b.collect(out);
        for (auto& b : trunk_rfb_) b.collect(out);
        pre_upsample_rfb_.collect(out);
        for (auto& s : stages_) s.collect(out);
        final_conv1_.collect(out);
        final_conv2_.collect(out);
        return out;
    }

    const GeneratorConfig& config() const { return cfg_; }

private:
    static std::string two_digits(int64_t i) {
        std::string s = std::to_string(i);
        return s.size() < 2 ? "0" + s : s;
    }

    GeneratorConfig cfg_;
    ConvLayer<S> first_conv_;
    std::vector<Rrdb<S>> trunk_a_;
    std::vector<Rrfdb<S>> trunk_rfb_;
    Rfb<S> pre_upsample_rfb_;
    std::vector<UpsampleStage<S>> stages_;
    ConvLayer<S> final_conv1_, final_conv2_;
};

/// Critic configuration. The stack alternates stride 1 / stride 2, doubling
/// the width every stride-2 step and capping at 8x base. The logit head is a
/// global average pool followed by a 1x1 conv, so any input whose spatial size
/// survives the stride-2 steps is accepted.
struct DiscriminatorConfig {
    int64_t in_channels = 3;
    int64_t base_channels = 64;
    int64_t n_layers = 8;
    double lrelu_alpha = 0.2;

    void validate() const {
        if (base_channels < 1 || n_layers < 2) throw ConfigError("discriminator: config too small");
    }

    bool operator==(const DiscriminatorConfig&) const = default;

    int64_t min_input_size() const { return int64_t(1) << (n_layers / 2); }
};

/// Predicts one raw realness logit per image; no sigmoid inside (the
/// relativistic deltas apply it).
template <class S>
class Discriminator {
public:
    Discriminator(const DiscriminatorConfig& cfg, uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        Rng rng = Rng::derive(seed, "discriminator");
        int64_t c_prev = cfg_.in_channels;
        convs_.reserve(static_cast<size_t>(cfg_.n_layers));
        for (int64_t i = 0; i < cfg_.n_layers; ++i) {
            const int64_t width = std::min(cfg_.base_channels << (i / 2), cfg_.base_channels * 8);
            ConvSpec spec = same_pad_spec(3, 3);
            spec.stride = (i % 2 == 0) ? 1 : 2;
            convs_.emplace_back("disc.conv" + std::to_string(i), c_prev, width, 3, 3, spec, rng, 1.0);
            c_prev = width;
        }
        head_ = ConvLayer<S>("disc.head", c_prev, 1, 1, 1, ConvSpec{}, rng, 1.0);
    }

    /// -> logits of shape (n, 1, 1, 1).
    template <class V>
    V forward(const V& x) {
        V y = convs_[0].forward(x);
        y = leaky_relu(y, static_cast<S>(cfg_.lrelu_alpha));
        for (size_t i = 1; i < convs_.size(); ++i)
            y = leaky_relu(convs_[i].forward(y), static_cast<S>(cfg_.lrelu_alpha));
        return head_.forward(global_avg_pool(y));
    }

    std::vector<Parameter<S>*> parameters() {
        std::vector<Parameter<S>*> out;
        for (auto& c : convs_) c.collect(out);
        head_.collect(out);
        return out;
    }

    const DiscriminatorConfig& config() const { return cfg_; }

    void set_trainable(bool trainable) {
        for (Parameter<S>* p : parameters()) p->trainable = trainable;
    }

private:
    DiscriminatorConfig cfg_;
    std::vector<ConvLayer<S>> convs_;
    ConvLayer<S> head_;
};

struct FeatureExtractorConfig {
    int64_t in_channels = 3;
    std::vector<int64_t> channels = {32, 64, 128};  // one stride-2 conv + ReLU per entry

    void validate() const {
        if (channels.empty()) throw ConfigError("feature extractor: needs at least one conv");
    }

    bool operator==(const FeatureExtractorConfig&) const = default;
};

/// Frozen conv stack for the perceptual loss. The tap is the last activation;
/// each stage halves the spatial size, so the feature map is always strictly
/// smaller than the input. Weights come either from a fixed seed (desk-scale
/// testing) or from a checkpoint file of a pretrained stack; they are never
/// updated by the optimizer.
template <class S>
class FeatureExtractor {
public:
    FeatureExtractor(const FeatureExtractorConfig& cfg, uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        Rng rng = Rng::derive(seed, "features");
        int64_t c_prev = cfg_.in_channels;
        convs_.reserve(cfg_.channels.size());
        for (size_t i = 0; i < cfg_.channels.size(); ++i) {
            ConvSpec spec = same_pad_spec(3, 3);
            spec.stride = 2;
            convs_.emplace_back("feat.conv" + std::to_string(i), c_prev, cfg_.channels[i], 3, 3, spec, rng,
                                1.0);
            c_prev = cfg_.channels[i];
        }
        for (Parameter<S>* p : parameters()) p->trainable = false;
    }

    template <class V>
    V forward(const V& x) {
        V y = relu(convs_[0].forward(x));
        for (size_t i = 1; i < convs_.size(); ++i) y = relu(convs_[i].forward(y));
        return y;
    }

    std::vector<Parameter<S>*> parameters() {
        std::vector<Parameter<S>*> out;
        for (auto& c : convs_) c.collect(out);
        return out;
    }

    const FeatureExtractorConfig& config() const { return cfg_; }

private:
    FeatureExtractorConfig cfg_;
    std::vector<ConvLayer<S>> convs_;
};

/// Exact number of trainable scalars in a parameter set.
template <class S>
int64_t count_parameters(const std::vector<Parameter<S>*>& params) {
    int64_t n = 0;
    for (const Parameter<S>* p : params) n += p->value.numel();
    return n;
}

template <class S, class Net>
    requires requires(Net& n) { n.parameters(); }
int64_t count_parameters(Net& net) {
    auto params = net.parameters();
    return count_parameters<S>(params);
}

}  // namespace rfbsr
