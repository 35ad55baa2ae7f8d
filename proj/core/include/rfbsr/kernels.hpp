// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfbsr/tensor.hpp"

namespace rfbsr {

/// Geometry of a 2-D convolution. Padding is zero padding; dilation inflates
/// the kernel footprint without adding parameters.
struct ConvSpec {
    int64_t stride = 1;
    int64_t pad_h = 0;
    int64_t pad_w = 0;
    int64_t dil_h = 1;
    int64_t dil_w = 1;

    constexpr bool operator==(const ConvSpec&) const = default;
};

/// Padding that keeps spatial dims for odd kernels at stride 1:
/// pad = dilation * (k - 1) / 2 per axis.
ConvSpec same_pad_spec(int64_t kh, int64_t kw, int64_t dil_h = 1, int64_t dil_w = 1);

Shape conv2d_output_shape(const Shape& x, const Shape& w, const ConvSpec& spec);

namespace kernels {

// -- convolution -----------------------------------------------------------

/// Direct convolution. weight shape is (c_out, c_in, kh, kw); bias, when
/// non-null, has shape (1, c_out, 1, 1).
template <class S>
Tensor<S> conv2d_forward(const Tensor<S>& x, const Tensor<S>& weight, const Tensor<S>* bias,
                         const ConvSpec& spec);

template <class S>
Tensor<S> conv2d_backward_data(const Tensor<S>& dy, const Tensor<S>& weight, const Shape& x_shape,
                               const ConvSpec& spec);

template <class S>
Tensor<S> conv2d_backward_weight(const Tensor<S>& dy, const Tensor<S>& x, const Shape& w_shape,
                                 const ConvSpec& spec);

template <class S>
Tensor<S> conv2d_backward_bias(const Tensor<S>& dy);

// -- elementwise -----------------------------------------------------------

template <class S>
Tensor<S> leaky_relu(const Tensor<S>& x, S alpha);
template <class S>
Tensor<S> leaky_relu_backward(const Tensor<S>& x, const Tensor<S>& dy, S alpha);

template <class S>
Tensor<S> relu(const Tensor<S>& x);
template <class S>
Tensor<S> relu_backward(const Tensor<S>& x, const Tensor<S>& dy);

template <class S>
Tensor<S> sigmoid(const Tensor<S>& x);
template <class S>
Tensor<S> sigmoid_backward(const Tensor<S>& y, const Tensor<S>& dy);  // uses saved output

/// log(max(x, eps)). The clamp keeps adversarial losses finite when the
/// discriminator saturates; gradient is zero in the clamped region.
template <class S>
Tensor<S> log_clamped(const Tensor<S>& x, S eps);
template <class S>
Tensor<S> log_clamped_backward(const Tensor<S>& x, const Tensor<S>& dy, S eps);

template <class S>
Tensor<S> add(const Tensor<S>& x, const Tensor<S>& y);

template <class S>
Tensor<S> scale(const Tensor<S>& x, S s);

/// a*x + b elementwise (used for 1 - delta and similar affine rewrites).
template <class S>
Tensor<S> affine(const Tensor<S>& x, S a, S b);

/// x - s where s is a scalar tensor (1,1,1,1), broadcast over all of x.
template <class S>
Tensor<S> sub_scalar(const Tensor<S>& x, const Tensor<S>& s);

// -- structural ------------------------------------------------------------

template <class S>
Tensor<S> concat_channels(std::span<const Tensor<S>* const> xs);
/// Slices dy back into per-input gradients (inverse of concat_channels).
template <class S>
std::vector<Tensor<S>> concat_channels_backward(const Tensor<S>& dy,
                                                std::span<const Shape> in_shapes);

template <class S>
Tensor<S> nearest_upsample(const Tensor<S>& x, int64_t r);
/// Gradient of nearest upsampling: r x r block-sum pooling.
template <class S>
Tensor<S> block_sum_pool(const Tensor<S>& dy, int64_t r);

template <class S>
Tensor<S> pixel_shuffle(const Tensor<S>& x, int64_t r);
template <class S>
Tensor<S> pixel_unshuffle(const Tensor<S>& x, int64_t r);

// -- reductions ------------------------------------------------------------

template <class S>
Tensor<S> mean_all(const Tensor<S>& x);  // -> (1,1,1,1)

template <class S>
Tensor<S> l1(const Tensor<S>& x, const Tensor<S>& y);  // mean |x - y| -> (1,1,1,1)

template <class S>
Tensor<S> global_avg_pool(const Tensor<S>& x);  // -> (n,c,1,1)

/// Inner product against fixed coefficients -> (1,1,1,1). A linear probe:
/// gradient w.r.t. x is exactly `coeffs`.
template <class S>
Tensor<S> inner_const(const Tensor<S>& x, const Tensor<S>& coeffs);

}  // namespace kernels
}  // namespace rfbsr
