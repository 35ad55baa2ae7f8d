// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/ensemble.hpp"

#include <algorithm>
#include <tuple>

namespace rfbsr {

CheckpointData average_checkpoints(const std::vector<std::filesystem::path>& paths, int64_t n) {
    if (n != static_cast<int64_t>(paths.size()) || n < 1)
        throw CheckpointError("ensemble: n = " + std::to_string(n) + " but " +
                              std::to_string(paths.size()) + " checkpoints given");

    std::vector<CheckpointData> loaded;
    loaded.reserve(paths.size());
    for (const auto& p : paths) loaded.push_back(load_checkpoint_file(p));

    const CheckpointData& first = loaded.front();
    for (size_t i = 1; i < loaded.size(); ++i) {
        if (loaded[i].fingerprint != first.fingerprint)
            throw CheckpointError("ensemble: fingerprint mismatch in " + paths[i].string());
        if (loaded[i].tensors.size() != first.tensors.size())
            throw CheckpointError("ensemble: parameter count mismatch in " + paths[i].string());
    }

    CheckpointData out;
    out.fingerprint = first.fingerprint;
    out.meta.stage = 2;
    out.meta.seed = first.meta.seed;
    for (const auto& ck : loaded) out.meta.source_steps.push_back(ck.meta.step);
    std::sort(out.meta.source_steps.begin(), out.meta.source_steps.end());
    out.meta.step = out.meta.source_steps.back();

    std::vector<double> vals(loaded.size());
    for (const auto& [name, ref] : first.tensors) {
        for (size_t i = 1; i < loaded.size(); ++i) {
            auto it = loaded[i].tensors.find(name);
            if (it == loaded[i].tensors.end())
                throw CheckpointError("ensemble: " + paths[i].string() + " is missing parameter " + name);
            if (it->second.shape != ref.shape || it->second.dtype != ref.dtype)
                throw CheckpointError("ensemble: shape/dtype mismatch for parameter " + name);
        }
        StoredTensor avg;
        avg.dtype = ref.dtype;
        avg.shape = ref.shape;
        const int64_t numel = ref.numel();
        if (ref.dtype == kDtypeF32)
            avg.f32.resize(static_cast<size_t>(numel));
        else
            avg.f64.resize(static_cast<size_t>(numel));
        for (int64_t e = 0; e < numel; ++e) {
            for (size_t i = 0; i < loaded.size(); ++i) {
                const StoredTensor& t = loaded[i].tensors.at(name);
                vals[i] = ref.dtype == kDtypeF32 ? static_cast<double>(t.f32[static_cast<size_t>(e)])
                                                 : t.f64[static_cast<size_t>(e)];
            }
            // sorted 64-bit accumulation: the sum does not depend on the order
            // the checkpoints were passed in
            std::sort(vals.begin(), vals.end());
            double acc = 0.0;
            for (double v : vals) acc += v;
            const double mean = acc / static_cast<double>(n);
            if (ref.dtype == kDtypeF32)
                avg.f32[static_cast<size_t>(e)] = static_cast<float>(mean);
            else
                avg.f64[static_cast<size_t>(e)] = mean;
        }
        out.tensors.emplace(name, std::move(avg));
    }
    return out;
}

std::vector<std::filesystem::path> select_top_checkpoints(
    const std::vector<std::filesystem::path>& candidates,
    const std::function<double(const std::filesystem::path&)>& score_fn, int64_t n) {
    if (n < 1 || n > static_cast<int64_t>(candidates.size()))
        throw CheckpointError("select_top_checkpoints: need " + std::to_string(n) + " of " +
                              std::to_string(candidates.size()) + " candidates");

    struct Entry {
        double score;
        uint64_t step;
        std::filesystem::path path;
    };
    std::vector<Entry> entries;
    entries.reserve(candidates.size());
    for (const auto& p : candidates) {
        const CheckpointData data = load_checkpoint_file(p);
        entries.push_back(Entry{score_fn(p), data.meta.step, p});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(b.score, b.step, b.path) < std::tie(a.score, a.step, a.path);
    });
    std::vector<std::filesystem::path> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) out.push_back(entries[static_cast<size_t>(i)].path);
    return out;
}

std::function<double(const std::filesystem::path&)> make_l1_scorer(
    const GeneratorConfig& cfg, std::vector<std::pair<Tensor<float>, Tensor<float>>> val_pairs) {
    if (val_pairs.empty()) throw ConfigError("l1 scorer: needs at least one validation pair");
    return [cfg, pairs = std::move(val_pairs)](const std::filesystem::path& path) {
        Generator<float> gen(cfg, 0);
        auto params = gen.parameters();
        load_checkpoint<float>(path, params, fingerprint_of(cfg));
        double total = 0.0;
        for (const auto& [lr, hr] : pairs) {
            const Tensor<float> sr = gen.forward(lr);
            total += static_cast<double>(l1(sr, hr).scalar());
        }
        return -total / static_cast<double>(pairs.size());
    };
}

}  // namespace rfbsr
