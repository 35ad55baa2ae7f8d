// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "rfbsr/tensor.hpp"

namespace rfbsr {

/// Loads an 8-bit RGB image (.png or .ppm P6) into a (1,3,h,w) float tensor,
/// mapping level k to exactly k/255. Non-RGB inputs fail; there is no silent
/// conversion.
Tensor<float> load_image(const std::filesystem::path& path);

/// Saves a (1,3,h,w) tensor: values are clamped to [0,1], rounded to the
/// nearest 8-bit level, and written losslessly. save then load reproduces the
/// decoded bytes of any 8-bit source exactly.
void save_image(const Tensor<float>& img, const std::filesystem::path& path);

bool image_extension_supported(const std::filesystem::path& path);

/// Clamp to [0,1] and snap to k/255 levels (the export quantization).
template <class S>
Tensor<S> quantize_8bit(const Tensor<S>& img);

}  // namespace rfbsr
