// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace rfbsr {

ConvSpec same_pad_spec(int64_t kh, int64_t kw, int64_t dil_h, int64_t dil_w) {
    require_shape((kh - 1) * dil_h % 2 == 0 && (kw - 1) * dil_w % 2 == 0,
                  "same padding needs an odd effective kernel extent");
    return ConvSpec{1, dil_h * (kh - 1) / 2, dil_w * (kw - 1) / 2, dil_h, dil_w};
}

Shape conv2d_output_shape(const Shape& x, const Shape& w, const ConvSpec& spec) {
    require_shape(w.valid() && x.valid(), "conv2d: invalid operand shape");
    require_shape(x.c == w.c, "conv2d: input has " + std::to_string(x.c) + " channels, weight expects " +
                                  std::to_string(w.c));
    require_shape(spec.stride >= 1 && spec.dil_h >= 1 && spec.dil_w >= 1 && spec.pad_h >= 0 && spec.pad_w >= 0,
                  "conv2d: stride/dilation must be >= 1 and padding >= 0");
    const int64_t oh = (x.h + 2 * spec.pad_h - spec.dil_h * (w.h - 1) - 1) / spec.stride + 1;
    const int64_t ow = (x.w + 2 * spec.pad_w - spec.dil_w * (w.w - 1) - 1) / spec.stride + 1;
    require_shape(oh >= 1 && ow >= 1, "conv2d: output dimension < 1 for input " + x.str());
    return Shape(x.n, w.n, oh, ow);
}

namespace kernels {
namespace {

// Valid output-x range for a kernel column offset `off`:
// 0 <= ox*stride + off < in_w, intersected with [0, out_w).
struct XRange {
    int64_t lo, hi;
};

XRange valid_ox(int64_t off, int64_t stride, int64_t in_w, int64_t out_w) {
    int64_t lo = 0;
    if (off < 0) lo = (-off + stride - 1) / stride;
    int64_t hi = 0;
    if (in_w - 1 - off >= 0) hi = std::min(out_w, (in_w - 1 - off) / stride + 1);
    return {std::min(lo, hi), hi};
}

}  // namespace

template <class S>
Tensor<S> conv2d_forward(const Tensor<S>& x, const Tensor<S>& weight, const Tensor<S>* bias,
                         const ConvSpec& spec) {
    const Shape os = conv2d_output_shape(x.shape, weight.shape, spec);
    if (bias) {
        require_shape(bias->shape == Shape(1, weight.shape.n, 1, 1),
                      "conv2d: bias shape must be (1,c_out,1,1), got " + bias->shape.str());
    }
    Tensor<S> y(os);
    const int64_t n = x.shape.n, ci = x.shape.c, ih = x.shape.h, iw = x.shape.w;
    const int64_t co = weight.shape.n, kh = weight.shape.h, kw = weight.shape.w;
    const int64_t oh = os.h, ow = os.w;
    const int64_t stride = spec.stride;

    for (int64_t in = 0; in < n; ++in) {
        for (int64_t oc = 0; oc < co; ++oc) {
            S* ybase = &y.data[static_cast<size_t>(((in * co + oc) * oh) * ow)];
            const S bv = bias ? bias->data[static_cast<size_t>(oc)] : S(0);
            std::fill(ybase, ybase + oh * ow, bv);
            for (int64_t ic = 0; ic < ci; ++ic) {
                const S* xbase = &x.data[static_cast<size_t>(((in * ci + ic) * ih) * iw)];
                const S* wbase = &weight.data[static_cast<size_t>(((oc * ci + ic) * kh) * kw)];
                for (int64_t ky = 0; ky < kh; ++ky) {
                    for (int64_t kx = 0; kx < kw; ++kx) {
                        const S wv = wbase[ky * kw + kx];
                        const int64_t off = kx * spec.dil_w - spec.pad_w;
                        const auto [lo, hi] = valid_ox(off, stride, iw, ow);
                        for (int64_t oy = 0; oy < oh; ++oy) {
                            const int64_t iy = oy * stride - spec.pad_h + ky * spec.dil_h;
                            if (iy < 0 || iy >= ih) continue;
                            S* yrow = ybase + oy * ow;
                            const S* xrow = xbase + iy * iw;
                            if (stride == 1) {
                                const S* xs = xrow + off;
                                for (int64_t ox = lo; ox < hi; ++ox) yrow[ox] += wv * xs[ox];
                            } else {
                                for (int64_t ox = lo; ox < hi; ++ox) yrow[ox] += wv * xrow[ox * stride + off];
                            }
                        }
                    }
                }
            }
        }
    }
    return y;
}

template <class S>
Tensor<S> conv2d_backward_data(const Tensor<S>& dy, const Tensor<S>& weight, const Shape& x_shape,
                               const ConvSpec& spec) {
    Tensor<S> dx(x_shape);
    const int64_t n = x_shape.n, ci = x_shape.c, ih = x_shape.h, iw = x_shape.w;
    const int64_t co = weight.shape.n, kh = weight.shape.h, kw = weight.shape.w;
    const int64_t oh = dy.shape.h, ow = dy.shape.w;
    const int64_t stride = spec.stride;

    for (int64_t in = 0; in < n; ++in) {
        for (int64_t oc = 0; oc < co; ++oc) {
            const S* dybase = &dy.data[static_cast<size_t>(((in * co + oc) * oh) * ow)];
            for (int64_t ic = 0; ic < ci; ++ic) {
                S* dxbase = &dx.data[static_cast<size_t>(((in * ci + ic) * ih) * iw)];
                const S* wbase = &weight.data[static_cast<size_t>(((oc * ci + ic) * kh) * kw)];
                for (int64_t ky = 0; ky < kh; ++ky) {
                    for (int64_t kx = 0; kx < kw; ++kx) {
                        const S wv = wbase[ky * kw + kx];
                        const int64_t off = kx * spec.dil_w - spec.pad_w;
                        const auto [lo, hi] = valid_ox(off, stride, iw, ow);
                        for (int64_t oy = 0; oy < oh; ++oy) {
                            const int64_t iy = oy * stride - spec.pad_h + ky * spec.dil_h;
                            if (iy < 0 || iy >= ih) continue;
                            const S* dyrow = dybase + oy * ow;
                            S* dxrow = dxbase + iy * iw;
                            if (stride == 1) {
                                S* dxs = dxrow + off;
                                for (int64_t ox = lo; ox < hi; ++ox) dxs[ox] += wv * dyrow[ox];
                            } else {
                                for (int64_t ox = lo; ox < hi; ++ox) dxrow[ox * stride + off] += wv * dyrow[ox];
                            }
                        }
                    }
                }
            }
        }
    }
    return dx;
}

template <class S>
Tensor<S> conv2d_backward_weight(const Tensor<S>& dy, const Tensor<S>& x, const Shape& w_shape,
                                 const ConvSpec& spec) {
    Tensor<S> dw(w_shape);
    const int64_t n = x.shape.n, ci = x.shape.c, ih = x.shape.h, iw = x.shape.w;
    const int64_t co = w_shape.n, kh = w_shape.h, kw = w_shape.w;
    const int64_t oh = dy.shape.h, ow = dy.shape.w;
    const int64_t stride = spec.stride;

    for (int64_t in = 0; in < n; ++in) {
        for (int64_t oc = 0; oc < co; ++oc) {
            const S* dybase = &dy.data[static_cast<size_t>(((in * co + oc) * oh) * ow)];
            for (int64_t ic = 0; ic < ci; ++ic) {
                const S* xbase = &x.data[static_cast<size_t>(((in * ci + ic) * ih) * iw)];
                S* dwbase = &dw.data[static_cast<size_t>(((oc * ci + ic) * kh) * kw)];
                for (int64_t ky = 0; ky < kh; ++ky) {
                    for (int64_t kx = 0; kx < kw; ++kx) {
                        const int64_t off = kx * spec.dil_w - spec.pad_w;
                        const auto [lo, hi] = valid_ox(off, stride, iw, ow);
                        S acc = 0;
                        for (int64_t oy = 0; oy < oh; ++oy) {
                            const int64_t iy = oy * stride - spec.pad_h + ky * spec.dil_h;
                            if (iy < 0 || iy >= ih) continue;
                            const S* dyrow = dybase + oy * ow;
                            const S* xrow = xbase + iy * iw;
                            if (stride == 1) {
                                const S* xs = xrow + off;
                                for (int64_t ox = lo; ox < hi; ++ox) acc += dyrow[ox] * xs[ox];
                            } else {
                                for (int64_t ox = lo; ox < hi; ++ox) acc += dyrow[ox] * xrow[ox * stride + off];
                            }
                        }
                        dwbase[ky * kw + kx] += acc;
                    }
                }
            }
        }
    }
    return dw;
}

template <class S>
Tensor<S> conv2d_backward_bias(const Tensor<S>& dy) {
    Tensor<S> db(Shape(1, dy.shape.c, 1, 1));
    const int64_t plane = dy.shape.h * dy.shape.w;
    for (int64_t in = 0; in < dy.shape.n; ++in) {
        for (int64_t c = 0; c < dy.shape.c; ++c) {
            const S* p = &dy.data[static_cast<size_t>((in * dy.shape.c + c) * plane)];
            S acc = 0;
            for (int64_t i = 0; i < plane; ++i) acc += p[i];
            db.data[static_cast<size_t>(c)] += acc;
        }
    }
    return db;
}

// -- elementwise -------------------------------------------------------------

template <class S>
Tensor<S> leaky_relu(const Tensor<S>& x, S alpha) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > S(0) ? x.data[i] : alpha * x.data[i];
    return y;
}

// Slope of the negative branch is used at exactly 0 (deterministic subgradient).
template <class S>
Tensor<S> leaky_relu_backward(const Tensor<S>& x, const Tensor<S>& dy, S alpha) {
    Tensor<S> dx(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) dx.data[i] = x.data[i] > S(0) ? dy.data[i] : alpha * dy.data[i];
    return dx;
}

template <class S>
Tensor<S> relu(const Tensor<S>& x) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > S(0) ? x.data[i] : S(0);
    return y;
}

template <class S>
Tensor<S> relu_backward(const Tensor<S>& x, const Tensor<S>& dy) {
    Tensor<S> dx(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) dx.data[i] = x.data[i] > S(0) ? dy.data[i] : S(0);
    return dx;
}

template <class S>
Tensor<S> sigmoid(const Tensor<S>& x) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) {
        const double v = static_cast<double>(x.data[i]);
        y.data[i] = static_cast<S>(1.0 / (1.0 + std::exp(-v)));
    }
    return y;
}

template <class S>
Tensor<S> sigmoid_backward(const Tensor<S>& y, const Tensor<S>& dy) {
    Tensor<S> dx(y.shape);
    for (size_t i = 0; i < y.data.size(); ++i) dx.data[i] = dy.data[i] * y.data[i] * (S(1) - y.data[i]);
    return dx;
}

template <class S>
Tensor<S> log_clamped(const Tensor<S>& x, S eps) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = std::log(std::max(x.data[i], eps));
    return y;
}

template <class S>
Tensor<S> log_clamped_backward(const Tensor<S>& x, const Tensor<S>& dy, S eps) {
    Tensor<S> dx(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) dx.data[i] = x.data[i] > eps ? dy.data[i] / x.data[i] : S(0);
    return dx;
}

template <class S>
Tensor<S> add(const Tensor<S>& x, const Tensor<S>& y) {
    require_shape(x.shape == y.shape, "add: shape mismatch " + x.shape.str() + " vs " + y.shape.str());
    Tensor<S> z(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) z.data[i] = x.data[i] + y.data[i];
    return z;
}

template <class S>
Tensor<S> scale(const Tensor<S>& x, S s) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = s * x.data[i];
    return y;
}

template <class S>
Tensor<S> affine(const Tensor<S>& x, S a, S b) {
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = a * x.data[i] + b;
    return y;
}

template <class S>
Tensor<S> sub_scalar(const Tensor<S>& x, const Tensor<S>& s) {
    require_shape(s.is_scalar(), "sub_scalar: subtrahend must be (1,1,1,1), got " + s.shape.str());
    const S sv = s.data[0];
    Tensor<S> y(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] - sv;
    return y;
}

// -- structural --------------------------------------------------------------

template <class S>
Tensor<S> concat_channels(std::span<const Tensor<S>* const> xs) {
    require_shape(!xs.empty(), "concat_channels: empty input list");
    const Shape& s0 = xs[0]->shape;
    int64_t c_total = 0;
    for (const Tensor<S>* t : xs) {
        require_shape(t->shape.n == s0.n && t->shape.h == s0.h && t->shape.w == s0.w,
                      "concat_channels: n/h/w mismatch " + t->shape.str() + " vs " + s0.str());
        c_total += t->shape.c;
    }
    Tensor<S> y(Shape(s0.n, c_total, s0.h, s0.w));
    const int64_t plane = s0.h * s0.w;
    for (int64_t in = 0; in < s0.n; ++in) {
        int64_t c_off = 0;
        for (const Tensor<S>* t : xs) {
            const size_t src = static_cast<size_t>(in * t->shape.c * plane);
            const size_t dst = static_cast<size_t>((in * c_total + c_off) * plane);
            std::copy_n(t->data.begin() + src, t->shape.c * plane, y.data.begin() + dst);
            c_off += t->shape.c;
        }
    }
    return y;
}

template <class S>
std::vector<Tensor<S>> concat_channels_backward(const Tensor<S>& dy, std::span<const Shape> in_shapes) {
    std::vector<Tensor<S>> grads;
    grads.reserve(in_shapes.size());
    const int64_t plane = dy.shape.h * dy.shape.w;
    int64_t c_off = 0;
    for (const Shape& s : in_shapes) {
        Tensor<S> g(s);
        for (int64_t in = 0; in < s.n; ++in) {
            const size_t src = static_cast<size_t>((in * dy.shape.c + c_off) * plane);
            const size_t dst = static_cast<size_t>(in * s.c * plane);
            std::copy_n(dy.data.begin() + src, s.c * plane, g.data.begin() + dst);
        }
        c_off += s.c;
        grads.push_back(std::move(g));
    }
    return grads;
}

template <class S>
Tensor<S> nearest_upsample(const Tensor<S>& x, int64_t r) {
    require_shape(r >= 2, "nearest_upsample: factor must be >= 2");
    Tensor<S> y(Shape(x.shape.n, x.shape.c, x.shape.h * r, x.shape.w * r));
    const int64_t nc = x.shape.n * x.shape.c;
    for (int64_t p = 0; p < nc; ++p) {
        const S* xp = &x.data[static_cast<size_t>(p * x.shape.h * x.shape.w)];
        S* yp = &y.data[static_cast<size_t>(p * y.shape.h * y.shape.w)];
        for (int64_t oy = 0; oy < y.shape.h; ++oy) {
            const S* xrow = xp + (oy / r) * x.shape.w;
            S* yrow = yp + oy * y.shape.w;
            for (int64_t ox = 0; ox < y.shape.w; ++ox) yrow[ox] = xrow[ox / r];
        }
    }
    return y;
}

template <class S>
Tensor<S> block_sum_pool(const Tensor<S>& dy, int64_t r) {
    require_shape(dy.shape.h % r == 0 && dy.shape.w % r == 0, "block_sum_pool: dims not divisible by factor");
    Tensor<S> g(Shape(dy.shape.n, dy.shape.c, dy.shape.h / r, dy.shape.w / r));
    const int64_t nc = dy.shape.n * dy.shape.c;
    for (int64_t p = 0; p < nc; ++p) {
        const S* dp = &dy.data[static_cast<size_t>(p * dy.shape.h * dy.shape.w)];
        S* gp = &g.data[static_cast<size_t>(p * g.shape.h * g.shape.w)];
        for (int64_t oy = 0; oy < dy.shape.h; ++oy) {
            const S* drow = dp + oy * dy.shape.w;
            S* grow = gp + (oy / r) * g.shape.w;
            for (int64_t ox = 0; ox < dy.shape.w; ++ox) grow[ox / r] += drow[ox];
        }
    }
    return g;
}

template <class S>
Tensor<S> pixel_shuffle(const Tensor<S>& x, int64_t r) {
    require_shape(r >= 1, "pixel_shuffle: factor must be >= 1");
    require_shape(x.shape.c % (r * r) == 0, "pixel_shuffle: channels " + std::to_string(x.shape.c) +
                                                " not divisible by r^2 = " + std::to_string(r * r));
    const int64_t oc = x.shape.c / (r * r);
    Tensor<S> y(Shape(x.shape.n, oc, x.shape.h * r, x.shape.w * r));
    for (int64_t in = 0; in < x.shape.n; ++in) {
        for (int64_t c = 0; c < oc; ++c) {
            S* yp = &y.data[static_cast<size_t>(((in * oc + c) * y.shape.h) * y.shape.w)];
            for (int64_t sh = 0; sh < r; ++sh) {
                for (int64_t sw = 0; sw < r; ++sw) {
                    const int64_t ic = c * r * r + sh * r + sw;
                    const S* xp = &x.data[static_cast<size_t>(((in * x.shape.c + ic) * x.shape.h) * x.shape.w)];
                    for (int64_t iy = 0; iy < x.shape.h; ++iy) {
                        S* yrow = yp + (iy * r + sh) * y.shape.w + sw;
                        const S* xrow = xp + iy * x.shape.w;
                        for (int64_t ix = 0; ix < x.shape.w; ++ix) yrow[ix * r] = xrow[ix];
                    }
                }
            }
        }
    }
    return y;
}

template <class S>
Tensor<S> pixel_unshuffle(const Tensor<S>& x, int64_t r) {
    require_shape(r >= 1, "pixel_unshuffle: factor must be >= 1");
    require_shape(x.shape.h % r == 0 && x.shape.w % r == 0, "pixel_unshuffle: dims not divisible by factor");
    const int64_t oc = x.shape.c * r * r;
    Tensor<S> y(Shape(x.shape.n, oc, x.shape.h / r, x.shape.w / r));
    for (int64_t in = 0; in < x.shape.n; ++in) {
        for (int64_t c = 0; c < x.shape.c; ++c) {
            const S* xp = &x.data[static_cast<size_t>(((in * x.shape.c + c) * x.shape.h) * x.shape.w)];
            for (int64_t sh = 0; sh < r; ++sh) {
                for (int64_t sw = 0; sw < r; ++sw) {
                    const int64_t yc = c * r * r + sh * r + sw;
                    S* yp = &y.data[static_cast<size_t>(((in * oc + yc) * y.shape.h) * y.shape.w)];
                    for (int64_t oy = 0; oy < y.shape.h; ++oy) {
                        const S* xrow = xp + (oy * r + sh) * x.shape.w + sw;
                        S* yrow = yp + oy * y.shape.w;
                        for (int64_t ox = 0; ox < y.shape.w; ++ox) yrow[ox] = xrow[ox * r];
                    }
                }
            }
        }
    }
    return y;
}

// -- reductions ---------------------------------------------------------------
// Reductions accumulate in double, left to right, so results are reproducible.

template <class S>
Tensor<S> mean_all(const Tensor<S>& x) {
    double acc = 0.0;
    for (S v : x.data) acc += static_cast<double>(v);
    return Tensor<S>::scalar_of(static_cast<S>(acc / static_cast<double>(x.numel())));
}

template <class S>
Tensor<S> l1(const Tensor<S>& x, const Tensor<S>& y) {
    require_shape(x.shape == y.shape, "l1: shape mismatch " + x.shape.str() + " vs " + y.shape.str());
    double acc = 0.0;
    for (size_t i = 0; i < x.data.size(); ++i) acc += std::abs(static_cast<double>(x.data[i]) - static_cast<double>(y.data[i]));
    return Tensor<S>::scalar_of(static_cast<S>(acc / static_cast<double>(x.numel())));
}

template <class S>
Tensor<S> inner_const(const Tensor<S>& x, const Tensor<S>& coeffs) {
    require_shape(x.shape == coeffs.shape, "inner_const: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x.data.size(); ++i) acc += static_cast<double>(x.data[i]) * static_cast<double>(coeffs.data[i]);
    return Tensor<S>::scalar_of(static_cast<S>(acc));
}

template <class S>
Tensor<S> global_avg_pool(const Tensor<S>& x) {
    Tensor<S> y(Shape(x.shape.n, x.shape.c, 1, 1));
    const int64_t plane = x.shape.h * x.shape.w;
    for (int64_t p = 0; p < x.shape.n * x.shape.c; ++p) {
        const S* xp = &x.data[static_cast<size_t>(p * plane)];
        double acc = 0.0;
        for (int64_t i = 0; i < plane; ++i) acc += static_cast<double>(xp[i]);
        y.data[static_cast<size_t>(p)] = static_cast<S>(acc / static_cast<double>(plane));
    }
    return y;
}

// -- explicit instantiations ---------------------------------------------------

#define RFBSR_INSTANTIATE_KERNELS(S)                                                                        \
    template Tensor<S> conv2d_forward<S>(const Tensor<S>&, const Tensor<S>&, const Tensor<S>*,             \
                                         const ConvSpec&);                                                  \
    template Tensor<S> conv2d_backward_data<S>(const Tensor<S>&, const Tensor<S>&, const Shape&,           \
                                               const ConvSpec&);                                           \
    template Tensor<S> conv2d_backward_weight<S>(const Tensor<S>&, const Tensor<S>&, const Shape&,         \
                                                 const ConvSpec&);                                         \
    template Tensor<S> conv2d_backward_bias<S>(const Tensor<S>&);                                          \
    template Tensor<S> leaky_relu<S>(const Tensor<S>&, S);                                                 \
    template Tensor<S> leaky_relu_backward<S>(const Tensor<S>&, const Tensor<S>&, S);                      \
    template Tensor<S> relu<S>(const Tensor<S>&);                                                          \
    template Tensor<S> relu_backward<S>(const Tensor<S>&, const Tensor<S>&);                               \
    template Tensor<S> sigmoid<S>(const Tensor<S>&);                                                       \
    template Tensor<S> sigmoid_backward<S>(const Tensor<S>&, const Tensor<S>&);                            \
    template Tensor<S> log_clamped<S>(const Tensor<S>&, S);                                                \
    template Tensor<S> log_clamped_backward<S>(const Tensor<S>&, const Tensor<S>&, S);                     \
    template Tensor<S> add<S>(const Tensor<S>&, const Tensor<S>&);                                         \
    template Tensor<S> scale<S>(const Tensor<S>&, S);                                                      \
    template Tensor<S> affine<S>(const Tensor<S>&, S, S);                                                  \
    template Tensor<S> sub_scalar<S>(const Tensor<S>&, const Tensor<S>&);                                  \
    template Tensor<S> concat_channels<S>(std::span<const Tensor<S>* const>);                              \
    template std::vector<Tensor<S>> concat_channels_backward<S>(const Tensor<S>&, std::span<const Shape>); \
    template Tensor<S> nearest_upsample<S>(const Tensor<S>&, int64_t);                                     \
    template Tensor<S> block_sum_pool<S>(const Tensor<S>&, int64_t);                                       \
    template Tensor<S> pixel_shuffle<S>(const Tensor<S>&, int64_t);                                        \
    template Tensor<S> pixel_unshuffle<S>(const Tensor<S>&, int64_t);                                      \
    template Tensor<S> mean_all<S>(const Tensor<S>&);                                                      \
    template Tensor<S> l1<S>(const Tensor<S>&, const Tensor<S>&);                                          \
    template Tensor<S> inner_const<S>(const Tensor<S>&, const Tensor<S>&);                                 \
    template Tensor<S> global_avg_pool<S>(const Tensor<S>&);

RFBSR_INSTANTIATE_KERNELS(float)
RFBSR_INSTANTIATE_KERNELS(double)

#undef RFBSR_INSTANTIATE_KERNELS

}  // namespace kernels
}  // namespace rfbsr
