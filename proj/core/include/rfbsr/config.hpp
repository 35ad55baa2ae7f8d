// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "rfbsr/metrics.hpp"
#include "rfbsr/trainer.hpp"

namespace rfbsr {

struct DataSettings {
    std::filesystem::path train_dir;
    std::filesystem::path val_dir;
    int64_t patch = 512;
    bool augment = true;
    int workers = 0;
};

/// Everything a CLI run needs, read from one JSON file with sections
/// model / loss / train / data / eval. Unknown keys are rejected; every field
/// has the documented default.
struct AppConfig {
    GeneratorConfig model;
    DiscriminatorConfig disc;
    FeatureExtractorConfig features;
    uint64_t feature_seed = 7;
    TrainRun train;
    DataSettings data;
    EvalProtocol eval;

    void validate() const;
};

/// Parses a config JSON string. Missing sections and keys fall back to
/// defaults; unknown sections or keys throw ConfigError.
AppConfig parse_config(const std::string& json_text);

AppConfig load_config_file(const std::filesystem::path& path);

/// The effective configuration (defaults filled in) as pretty JSON; echoed to
/// the log at startup so runs are self-describing.
std::string config_to_json(const AppConfig& cfg);

}  // namespace rfbsr
