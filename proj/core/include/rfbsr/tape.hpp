// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode automatic differentiation over the kernel set. A Tape records
// one forward graph; backward() replays it once in reverse and accumulates
// (+=) into Parameter.grad. Tapes are single-use and confined to one thread.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rfbsr/kernels.hpp"
#include "rfbsr/param.hpp"

namespace rfbsr {

template <class S>
class Tape;

/// Handle to a value recorded on a tape.
template <class S>
struct Rec {
    Tape<S>* tape = nullptr;
    int id = -1;

    const Tensor<S>& value() const { return tape->value(id); }
    const Shape& shape() const { return tape->value(id).shape; }
};

template <class S>
class Tape {
public:
    using BackFn = std::function<void(Tape&, int)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Rec<S> constant(Tensor<S> v) { return {this, add_node(std::move(v), nullptr, nullptr)}; }

    /// Binds a parameter as a leaf; repeated calls for the same parameter
    /// return the same node so gradient contributions merge.
    Rec<S> leaf(Parameter<S>& p) {
        auto it = leaf_ids_.find(&p);
        if (it != leaf_ids_.end()) return {this, it->second};
        const int id = add_node(p.value, nullptr, &p);
        leaf_ids_.emplace(&p, id);
        return {this, id};
    }

    Rec<S> emplace(Tensor<S> v, BackFn fn) { return {this, add_node(std::move(v), std::move(fn), nullptr)}; }

    const Tensor<S>& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }

    /// True when the node's gradient participates in the reverse pass: interior
    /// nodes always do, leaves only while their parameter is trainable.
    bool wants_grad(int id) const {
        const Node& n = nodes_[static_cast<size_t>(id)];
        if (n.backward) return true;
        return n.param != nullptr && n.param->trainable;
    }

    void accumulate(int id, Tensor<S>&& g) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (!n.grad) {
            n.grad = std::move(g);
            return;
        }
        require_shape(n.grad->shape == g.shape, "tape: gradient shape mismatch");
        for (size_t i = 0; i < g.data.size(); ++i) n.grad->data[i] += g.data[i];
    }

    /// Gradient of the last backward() w.r.t. node `id`; zeros if the node was
    /// not reached.
    Tensor<S> grad(int id) const {
        const Node& n = nodes_[static_cast<size_t>(id)];
        return n.grad ? *n.grad : Tensor<S>(n.value.shape);
    }

    /// Reverse pass from a scalar loss node. May be invoked at most once.
    void backward(Rec<S> loss) {
        if (backward_done_) throw Error("tape: backward invoked twice on one tape");
        backward_done_ = true;
        require_shape(value(loss.id).is_scalar(), "tape: backward root must be a scalar node");
        accumulate(loss.id, Tensor<S>::scalar_of(S(1)));
        for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
            Node& n = nodes_[static_cast<size_t>(id)];
            if (n.backward && n.grad) n.backward(*this, id);
        }
        for (auto& [param, id] : leaf_ids_) {
            Node& n = nodes_[static_cast<size_t>(id)];
            if (!param->trainable || !n.grad) continue;
            for (size_t i = 0; i < n.grad->data.size(); ++i) param->grad.data[i] += n.grad->data[i];
        }
    }

    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor<S> value;
        std::optional<Tensor<S>> grad;
        BackFn backward;
        Parameter<S>* param = nullptr;
    };

    int add_node(Tensor<S> v, BackFn fn, Parameter<S>* p) {
        nodes_.push_back(Node{std::move(v), std::nullopt, std::move(fn), p});
        return static_cast<int>(nodes_.size()) - 1;
    }

    std::vector<Node> nodes_;
    std::unordered_map<Parameter<S>*, int> leaf_ids_;
    bool backward_done_ = false;
};

// ---------------------------------------------------------------------------
// Value-level ops (no tape). These are the plain forward computations; the
// recorded overloads below share them, so both paths compute identical values.
// ---------------------------------------------------------------------------

inline constexpr double kLogClampEps = 1e-12;

template <class S>
Tensor<S> conv2d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>* b, const ConvSpec& spec) {
    return kernels::conv2d_forward(x, w, b, spec);
}
template <class S>
Tensor<S> conv2d(const Tensor<S>& x, const Tensor<S>& w, const ConvSpec& spec) {
    return kernels::conv2d_forward(x, w, static_cast<const Tensor<S>*>(nullptr), spec);
}
template <class S>
Tensor<S> leaky_relu(const Tensor<S>& x, S alpha) {
    return kernels::leaky_relu(x, alpha);
}
template <class S>
Tensor<S> relu(const Tensor<S>& x) {
    return kernels::relu(x);
}
template <class S>
Tensor<S> sigmoid(const Tensor<S>& x) {
    return kernels::sigmoid(x);
}
template <class S>
Tensor<S> log_clamped(const Tensor<S>& x, S eps = static_cast<S>(kLogClampEps)) {
    return kernels::log_clamped(x, eps);
}
template <class S>
Tensor<S> add(const Tensor<S>& x, const Tensor<S>& y) {
    return kernels::add(x, y);
}
template <class S>
Tensor<S> scale(const Tensor<S>& x, S s) {
    return kernels::scale(x, s);
}
template <class S>
Tensor<S> affine(const Tensor<S>& x, S a, S b) {
    return kernels::affine(x, a, b);
}
template <class S>
Tensor<S> sub_scalar(const Tensor<S>& x, const Tensor<S>& s) {
    return kernels::sub_scalar(x, s);
}
template <class S>
Tensor<S> concat_channels(std::span<const Tensor<S>* const> xs) {
    return kernels::concat_channels(xs);
}
template <class S>
Tensor<S> concat_channels(const std::vector<Tensor<S>>& xs) {
    std::vector<const Tensor<S>*> ps;
    ps.reserve(xs.size());
    for (const auto& t : xs) ps.push_back(&t);
    return kernels::concat_channels(std::span<const Tensor<S>* const>(ps));
}
template <class S>
Tensor<S> nearest_upsample(const Tensor<S>& x, int64_t r) {
    return kernels::nearest_upsample(x, r);
}
template <class S>
Tensor<S> pixel_shuffle(const Tensor<S>& x, int64_t r) {
    return kernels::pixel_shuffle(x, r);
}
template <class S>
Tensor<S> pixel_unshuffle(const Tensor<S>& x, int64_t r) {
    return kernels::pixel_unshuffle(x, r);
}
template <class S>
Tensor<S> mean_all(const Tensor<S>& x) {
    return kernels::mean_all(x);
}
template <class S>
Tensor<S> l1(const Tensor<S>& x, const Tensor<S>& y) {
    return kernels::l1(x, y);
}
template <class S>
Tensor<S> global_avg_pool(const Tensor<S>& x) {
    return kernels::global_avg_pool(x);
}
template <class S>
Tensor<S> inner_const(const Tensor<S>& x, const Tensor<S>& coeffs) {
    return kernels::inner_const(x, coeffs);
}

// ---------------------------------------------------------------------------
// Recorded ops.
// ---------------------------------------------------------------------------

template <class S>
Rec<S> conv2d(Rec<S> x, Rec<S> w, std::optional<Rec<S>> b, const ConvSpec& spec) {
    Tape<S>& tape = *x.tape;
    Tensor<S> y = kernels::conv2d_forward(x.value(), w.value(), b ? &b->value() : nullptr, spec);
    const int xid = x.id, wid = w.id, bid = b ? b->id : -1;
    return tape.emplace(std::move(y), [xid, wid, bid, spec](Tape<S>& t, int self) {
        const Tensor<S> dy = t.grad(self);
        if (t.wants_grad(xid))
            t.accumulate(xid, kernels::conv2d_backward_data(dy, t.value(wid), t.value(xid).shape, spec));
        if (t.wants_grad(wid))
            t.accumulate(wid, kernels::conv2d_backward_weight(dy, t.value(xid), t.value(wid).shape, spec));
        if (bid >= 0 && t.wants_grad(bid)) t.accumulate(bid, kernels::conv2d_backward_bias(dy));
    });
}

template <class S>
Rec<S> conv2d(Rec<S> x, Rec<S> w, const ConvSpec& spec) {
    return conv2d(x, w, std::optional<Rec<S>>{}, spec);
}

template <class S>
Rec<S> leaky_relu(Rec<S> x, S alpha) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::leaky_relu(x.value(), alpha), [xid, alpha](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::leaky_relu_backward(t.value(xid), t.grad(self), alpha));
    });
}

template <class S>
Rec<S> relu(Rec<S> x) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::relu(x.value()), [xid](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::relu_backward(t.value(xid), t.grad(self)));
    });
}

template <class S>
Rec<S> sigmoid(Rec<S> x) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::sigmoid(x.value()), [xid](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::sigmoid_backward(t.value(self), t.grad(self)));
    });
}

template <class S>
Rec<S> log_clamped(Rec<S> x, S eps = static_cast<S>(kLogClampEps)) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::log_clamped(x.value(), eps), [xid, eps](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::log_clamped_backward(t.value(xid), t.grad(self), eps));
    });
}

template <class S>
Rec<S> add(Rec<S> x, Rec<S> y) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id, yid = y.id;
    return tape.emplace(kernels::add(x.value(), y.value()), [xid, yid](Tape<S>& t, int self) {
        if (t.wants_grad(xid)) t.accumulate(xid, t.grad(self));
        if (t.wants_grad(yid)) t.accumulate(yid, t.grad(self));
    });
}

template <class S>
Rec<S> scale(Rec<S> x, S s) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::scale(x.value(), s), [xid, s](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::scale(t.grad(self), s));
    });
}

template <class S>
Rec<S> affine(Rec<S> x, S a, S b) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::affine(x.value(), a, b), [xid, a](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::scale(t.grad(self), a));
    });
}

template <class S>
Rec<S> sub_scalar(Rec<S> x, Rec<S> s) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id, sid = s.id;
    return tape.emplace(kernels::sub_scalar(x.value(), s.value()), [xid, sid](Tape<S>& t, int self) {
        const Tensor<S> dy = t.grad(self);
        if (t.wants_grad(xid)) t.accumulate(xid, Tensor<S>(dy));
        if (t.wants_grad(sid)) {
            double acc = 0.0;
            for (S v : dy.data) acc += static_cast<double>(v);
            t.accumulate(sid, Tensor<S>::scalar_of(static_cast<S>(-acc)));
        }
    });
}

template <class S>
Rec<S> concat_channels(std::span<const Rec<S>> xs) {
    require_shape(!xs.empty(), "concat_channels: empty input list");
    Tape<S>& tape = *xs[0].tape;
    std::vector<const Tensor<S>*> vals;
    std::vector<int> ids;
    std::vector<Shape> shapes;
    for (const Rec<S>& r : xs) {
        vals.push_back(&r.value());
        ids.push_back(r.id);
        shapes.push_back(r.shape());
    }
    Tensor<S> y = kernels::concat_channels(std::span<const Tensor<S>* const>(vals));
    return tape.emplace(std::move(y), [ids, shapes](Tape<S>& t, int self) {
        auto slices = kernels::concat_channels_backward(t.grad(self), std::span<const Shape>(shapes));
        for (size_t i = 0; i < ids.size(); ++i)
            if (t.wants_grad(ids[i])) t.accumulate(ids[i], std::move(slices[i]));
    });
}

template <class S>
Rec<S> concat_channels(const std::vector<Rec<S>>& xs) {
    return concat_channels(std::span<const Rec<S>>(xs));
}

template <class S>
Rec<S> nearest_upsample(Rec<S> x, int64_t r) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::nearest_upsample(x.value(), r), [xid, r](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::block_sum_pool(t.grad(self), r));
    });
}

template <class S>
Rec<S> pixel_shuffle(Rec<S> x, int64_t r) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::pixel_shuffle(x.value(), r), [xid, r](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::pixel_unshuffle(t.grad(self), r));
    });
}

template <class S>
Rec<S> mean_all(Rec<S> x) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::mean_all(x.value()), [xid](Tape<S>& t, int self) {
        const S g = t.grad(self).data[0] / static_cast<S>(t.value(xid).numel());
        t.accumulate(xid, Tensor<S>(t.value(xid).shape, g));
    });
}

template <class S>
Rec<S> l1(Rec<S> x, Rec<S> y) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id, yid = y.id;
    return tape.emplace(kernels::l1(x.value(), y.value()), [xid, yid](Tape<S>& t, int self) {
        // Subgradient 0 where x == y.
        const S g = t.grad(self).data[0] / static_cast<S>(t.value(xid).numel());
        const Tensor<S>&xv = t.value(xid), &yv = t.value(yid);
        const bool wx = t.wants_grad(xid), wy = t.wants_grad(yid);
        Tensor<S> dx(xv.shape), dy(yv.shape);
        for (size_t i = 0; i < xv.data.size(); ++i) {
            const S d = xv.data[i] - yv.data[i];
            const S s = d > S(0) ? g : (d < S(0) ? -g : S(0));
            if (wx) dx.data[i] = s;
            if (wy) dy.data[i] = -s;
        }
        if (wx) t.accumulate(xid, std::move(dx));
        if (wy) t.accumulate(yid, std::move(dy));
    });
}

template <class S>
Rec<S> inner_const(Rec<S> x, Tensor<S> coeffs) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    Tensor<S> y = kernels::inner_const(x.value(), coeffs);
    return tape.emplace(std::move(y), [xid, coeffs = std::move(coeffs)](Tape<S>& t, int self) {
        t.accumulate(xid, kernels::scale(coeffs, t.grad(self).data[0]));
    });
}

template <class S>
Rec<S> global_avg_pool(Rec<S> x) {
    Tape<S>& tape = *x.tape;
    const int xid = x.id;
    return tape.emplace(kernels::global_avg_pool(x.value()), [xid](Tape<S>& t, int self) {
        const Tensor<S>& dy = t.grad(self);
        const Shape xs = t.value(xid).shape;
        const int64_t plane = xs.h * xs.w;
        Tensor<S> dx(xs);
        for (int64_t p = 0; p < xs.n * xs.c; ++p) {
            const S g = dy.data[static_cast<size_t>(p)] / static_cast<S>(plane);
            S* out = &dx.data[static_cast<size_t>(p * plane)];
            for (int64_t i = 0; i < plane; ++i) out[i] = g;
        }
        t.accumulate(xid, std::move(dx));
    });
}

}  // namespace rfbsr
