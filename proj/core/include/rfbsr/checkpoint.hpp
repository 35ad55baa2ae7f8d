// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Bit-exact parameter serialization. The on-disk layout (all integers little
// endian, entries sorted by name, FNV-1a 64 checksum over every preceding
// byte) is documented in README.md and is the only model interchange format.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfbsr/networks.hpp"

namespace rfbsr {

inline constexpr uint16_t kCheckpointVersion = 1;
inline constexpr uint8_t kDtypeF32 = 0;
inline constexpr uint8_t kDtypeF64 = 1;

using Fingerprint = std::array<uint8_t, 32>;

struct CheckpointMeta {
    uint64_t step = 0;
    uint8_t stage = 0;  // 0 = psnr, 1 = gan, 2 = ensemble
    uint64_t seed = 0;
    std::vector<uint64_t> source_steps;  // ensemble provenance, empty otherwise
};

/// One stored tensor; exactly one of f32/f64 is populated per dtype tag.
struct StoredTensor {
    uint8_t dtype = kDtypeF32;
    Shape shape;
    std::vector<float> f32;
    std::vector<double> f64;

    int64_t numel() const { return shape.numel(); }
};

struct CheckpointData {
    uint16_t version = kCheckpointVersion;
    Fingerprint fingerprint{};
    CheckpointMeta meta;
    std::map<std::string, StoredTensor> tensors;  // key order == file order
};

/// SHA-256 of an arbitrary byte string; the architecture fingerprint is the
/// digest of the canonical config string below.
Fingerprint sha256(std::string_view bytes);

/// Canonical, whitespace-free architecture description. Metadata such as step
/// or seed never enters this string, so checkpoints of one architecture share
/// a fingerprint across training.
std::string canonical_config_string(const GeneratorConfig& cfg);
Fingerprint fingerprint_of(const GeneratorConfig& cfg);

std::string fingerprint_hex(const Fingerprint& fp);

void save_checkpoint_data(const CheckpointData& data, const std::filesystem::path& path);
CheckpointData load_checkpoint_file(const std::filesystem::path& path);

namespace detail {
StoredTensor store(const Tensor<float>& t);
StoredTensor store(const Tensor<double>& t);
void restore(const StoredTensor& s, Tensor<float>& out);
void restore(const StoredTensor& s, Tensor<double>& out);
}  // namespace detail

/// Snapshot of a parameter set at its native precision.
template <class S>
CheckpointData make_checkpoint(const std::vector<Parameter<S>*>& params, const Fingerprint& fp,
                               const CheckpointMeta& meta) {
    CheckpointData data;
    data.fingerprint = fp;
    data.meta = meta;
    for (const Parameter<S>* p : params) {
        auto [it, inserted] = data.tensors.emplace(p->name, detail::store(p->value));
        if (!inserted) throw CheckpointError("duplicate parameter name: " + p->name);
    }
    return data;
}

template <class S>
void save_checkpoint(const std::vector<Parameter<S>*>& params, const Fingerprint& fp,
                     const CheckpointMeta& meta, const std::filesystem::path& path) {
    save_checkpoint_data(make_checkpoint(params, fp, meta), path);
}

/// Applies a loaded checkpoint to a parameter set, all-or-nothing: every
/// mismatch is detected before any tensor is written, and the error names the
/// first offending parameter. With `force`, only the name/shape/dtype
/// intersection is applied and the skipped names are returned.
template <class S>
std::vector<std::string> apply_checkpoint(const CheckpointData& data,
                                          const std::vector<Parameter<S>*>& params,
                                          const std::optional<Fingerprint>& expected_fp, bool force = false) {
    if (!force && expected_fp && data.fingerprint != *expected_fp)
        throw CheckpointError("checkpoint fingerprint " + fingerprint_hex(data.fingerprint) +
                              " does not match the target network " + fingerprint_hex(*expected_fp));
    constexpr uint8_t want_dtype = sizeof(S) == 4 ? kDtypeF32 : kDtypeF64;
    std::vector<std::string> skipped;
    std::vector<std::pair<Parameter<S>*, const StoredTensor*>> plan;
    std::map<std::string, Parameter<S>*> by_name;
    for (Parameter<S>* p : params) by_name.emplace(p->name, p);

    for (const auto& [name, stored] : data.tensors) {
        auto it = by_name.find(name);
        const bool usable =
            it != by_name.end() && stored.shape == it->second->value.shape && stored.dtype == want_dtype;
        if (usable) {
            plan.emplace_back(it->second, &stored);
            by_name.erase(it);
        } else if (force) {
            skipped.push_back(name);
        } else if (it == by_name.end()) {
            throw CheckpointError("checkpoint has unknown parameter: " + name);
        } else if (stored.shape != it->second->value.shape) {
            throw CheckpointError("shape mismatch for parameter " + name + ": checkpoint " +
                                  stored.shape.str() + " vs network " + it->second->value.shape.str());
        } else {
            throw CheckpointError("dtype mismatch for parameter " + name);
        }
    }
    if (!force && !by_name.empty())
        throw CheckpointError("checkpoint is missing parameter: " + by_name.begin()->first);

    for (auto& [p, stored] : plan) detail::restore(*stored, p->value);
    return skipped;
}

template <class S>
std::vector<std::string> load_checkpoint(const std::filesystem::path& path,
                                         const std::vector<Parameter<S>*>& params,
                                         const std::optional<Fingerprint>& expected_fp, bool force = false) {
    return apply_checkpoint(load_checkpoint_file(path), params, expected_fp, force);
}

}  // namespace rfbsr
