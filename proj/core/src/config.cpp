// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rfbsr {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + section + "." + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

UpsampleStageSpec parse_stage(const std::string& s) {
    if (s == "nni") return {UpsampleKind::nni, true};
    if (s == "spc") return {UpsampleKind::spc, true};
    if (s == "nni_bare") return {UpsampleKind::nni, false};
    if (s == "spc_bare") return {UpsampleKind::spc, false};
    throw ConfigError("unknown upsample stage '" + s + "' (expected nni|spc|nni_bare|spc_bare)");
}

std::string stage_name(const UpsampleStageSpec& s) {
    std::string n = s.kind == UpsampleKind::nni ? "nni" : "spc";
    if (!s.with_rfb) n += "_bare";
    return n;
}

void parse_model(const json& j, AppConfig& cfg) {
    check_keys(j, "model",
               {"n_rrdb", "n_rrfdb", "rfb_per_rrfdb", "base_channels", "growth", "scale", "upsample_plan",
                "residual_scale", "rfb_residual_scale", "lrelu_alpha", "in_channels", "out_channels",
                "disc_base_channels", "disc_layers", "feature_channels", "feature_seed"});
    read(j, "n_rrdb", cfg.model.n_rrdb);
    read(j, "n_rrfdb", cfg.model.n_rrfdb);
    read(j, "rfb_per_rrfdb", cfg.model.rfb_per_rrfdb);
    read(j, "base_channels", cfg.model.base_channels);
    read(j, "growth", cfg.model.growth);
    read(j, "scale", cfg.model.scale);
    read(j, "residual_scale", cfg.model.residual_scale);
    read(j, "rfb_residual_scale", cfg.model.rfb_residual_scale);
    read(j, "lrelu_alpha", cfg.model.lrelu_alpha);
    read(j, "in_channels", cfg.model.in_channels);
    read(j, "out_channels", cfg.model.out_channels);
    if (j.contains("upsample_plan")) {
        std::vector<std::string> names;
        read(j, "upsample_plan", names);
        cfg.model.upsample_plan.clear();
        for (const auto& n : names) cfg.model.upsample_plan.push_back(parse_stage(n));
    } else if (j.contains("scale")) {
        // Keep the default plan consistent with an overridden scale.
        int64_t s = cfg.model.scale;
        int64_t stages = 0;
        while (s > 1 && s % 2 == 0) {
            s /= 2;
            ++stages;
        }
        if (s != 1) throw ConfigError("model.scale must be a power of two when upsample_plan is omitted");
        cfg.model.upsample_plan = default_upsample_plan(stages);
    }
    read(j, "disc_base_channels", cfg.disc.base_channels);
    read(j, "disc_layers", cfg.disc.n_layers);
    read(j, "feature_channels", cfg.features.channels);
    read(j, "feature_seed", cfg.feature_seed);
    cfg.disc.lrelu_alpha = cfg.model.lrelu_alpha;
}

void parse_loss(const json& j, AppConfig& cfg) {
    check_keys(j, "loss", {"lambda", "eta", "fake_literal_paper"});
    read(j, "lambda", cfg.train.weights.lambda);
    read(j, "eta", cfg.train.weights.eta);
    read(j, "fake_literal_paper", cfg.train.fake_literal_paper);
}

void parse_train(const json& j, AppConfig& cfg) {
    check_keys(j, "train",
               {"stage", "steps", "batch", "checkpoint_every", "seed", "lr", "d_steps_per_g",
                "use_feature_loss"});
    if (j.contains("stage")) {
        std::string s;
        read(j, "stage", s);
        if (s == "psnr")
            cfg.train.stage = Stage::psnr;
        else if (s == "gan")
            cfg.train.stage = Stage::gan;
        else
            throw ConfigError("train.stage must be 'psnr' or 'gan'");
    }
    read(j, "steps", cfg.train.steps);
    read(j, "batch", cfg.train.batch_size);
    read(j, "checkpoint_every", cfg.train.checkpoint_every);
    read(j, "seed", cfg.train.seed);
    if (j.contains("lr")) {
        double lr = 0.0;
        read(j, "lr", lr);
        if (lr <= 0.0) throw ConfigError("train.lr must be > 0");
        cfg.train.lr_override = lr;
    }
    read(j, "d_steps_per_g", cfg.train.d_steps_per_g);
    read(j, "use_feature_loss", cfg.train.use_feature_loss);
}

void parse_data(const json& j, AppConfig& cfg) {
    check_keys(j, "data", {"train_dir", "val_dir", "patch", "augment", "workers"});
    std::string train_dir, val_dir;
    read(j, "train_dir", train_dir);
    read(j, "val_dir", val_dir);
    if (!train_dir.empty()) cfg.data.train_dir = train_dir;
    if (!val_dir.empty()) cfg.data.val_dir = val_dir;
    read(j, "patch", cfg.data.patch);
    read(j, "augment", cfg.data.augment);
    read(j, "workers", cfg.data.workers);
}

void parse_eval(const json& j, AppConfig& cfg) {
    check_keys(j, "eval", {"crop", "on_quantized"});
    read(j, "crop", cfg.eval.crop);
    read(j, "on_quantized", cfg.eval.on_quantized);
}

}  // namespace

void AppConfig::validate() const {
    model.validate();
    disc.validate();
    features.validate();
    train.weights.validate();
    if (train.steps < 0 || train.batch_size < 1) throw ConfigError("train.steps/batch out of range");
    if (train.d_steps_per_g < 1) throw ConfigError("train.d_steps_per_g must be >= 1");
    if (data.patch < model.scale || data.patch % model.scale != 0)
        throw ConfigError("data.patch must be a positive multiple of model.scale");
    if (data.workers < 0) throw ConfigError("data.workers must be >= 0");
}

AppConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "(root)", {"model", "loss", "train", "data", "eval"});
    AppConfig cfg;
    if (j.contains("model")) parse_model(j.at("model"), cfg);
    if (j.contains("loss")) parse_loss(j.at("loss"), cfg);
    if (j.contains("train")) parse_train(j.at("train"), cfg);
    if (j.contains("data")) parse_data(j.at("data"), cfg);
    if (j.contains("eval")) parse_eval(j.at("eval"), cfg);
    cfg.validate();
    return cfg;
}

AppConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const AppConfig& cfg) {
    json plan = json::array();
    for (const auto& s : cfg.model.upsample_plan) plan.push_back(stage_name(s));
    json j = {
        {"model",
         {{"n_rrdb", cfg.model.n_rrdb},
          {"n_rrfdb", cfg.model.n_rrfdb},
          {"rfb_per_rrfdb", cfg.model.rfb_per_rrfdb},
          {"base_channels", cfg.model.base_channels},
          {"growth", cfg.model.growth},
          {"scale", cfg.model.scale},
          {"upsample_plan", plan},
          {"residual_scale", cfg.model.residual_scale},
          {"rfb_residual_scale", cfg.model.rfb_residual_scale},
          {"lrelu_alpha", cfg.model.lrelu_alpha},
          {"in_channels", cfg.model.in_channels},
          {"out_channels", cfg.model.out_channels},
          {"disc_base_channels", cfg.disc.base_channels},
          {"disc_layers", cfg.disc.n_layers},
          {"feature_channels", cfg.features.channels},
          {"feature_seed", cfg.feature_seed}}},
        {"loss",
         {{"lambda", cfg.train.weights.lambda},
          {"eta", cfg.train.weights.eta},
          {"fake_literal_paper", cfg.train.fake_literal_paper}}},
        {"train",
         {{"stage", cfg.train.stage == Stage::psnr ? "psnr" : "gan"},
          {"steps", cfg.train.steps},
          {"batch", cfg.train.batch_size},
          {"checkpoint_every", cfg.train.checkpoint_every},
          {"seed", cfg.train.seed},
          {"d_steps_per_g", cfg.train.d_steps_per_g},
          {"use_feature_loss", cfg.train.use_feature_loss}}},
        {"data",
         {{"train_dir", cfg.data.train_dir.string()},
          {"val_dir", cfg.data.val_dir.string()},
          {"patch", cfg.data.patch},
          {"augment", cfg.data.augment},
          {"workers", cfg.data.workers}}},
        {"eval", {{"crop", cfg.eval.crop}, {"on_quantized", cfg.eval.on_quantized}}},
    };
    if (cfg.train.lr_override) j["train"]["lr"] = *cfg.train.lr_override;
    return j.dump(2);
}

}  // namespace rfbsr
