#include "adl/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "adl/error.hpp"

namespace adl::config {

namespace {

template <typename T>
void read(const YAML::Node& node, const char* key, T& target) {
    if (node[key]) target = node[key].as<T>();
}

Stage stage_of(const std::string& name) {
    auto s = parse_stage(name);
    if (!s) throw ConfigError("unknown stage '" + name + "'");
    return *s;
}

ann::ModelKind kind_of(const std::string& name) {
    auto k = ann::parse_kind(name);
    if (!k) throw ConfigError("unknown model kind '" + name + "'");
    return *k;
}

SensorAvailability sensors_of(const YAML::Node& list) {
    SensorAvailability s;
    for (const auto& item : list) {
        const auto n = item.as<std::string>();
        if (n == "accel") s.accel = true;
        else if (n == "magnet") s.magnet = true;
        else if (n == "gyro") s.gyro = true;
        else if (n == "mic") s.mic = true;
        else if (n == "gps") s.gps = true;
        else throw ConfigError("unknown sensor '" + n + "'");
    }
    return s;
}

void read_mfcc(const YAML::Node& n, audio::MfccConfig& c) {
    read(n, "frame_length", c.frame_length);
    read(n, "hop", c.hop);
    read(n, "n_mel_filters", c.n_mel_filters);
    read(n, "n_coefficients", c.n_coefficients);
    read(n, "pre_emphasis", c.pre_emphasis);
    read(n, "fmin", c.fmin);
    if (n["fmax"]) c.fmax = n["fmax"].as<double>();
}

void read_fusion(const YAML::Node& n, fusion::FusionConfig& c) {
    read(n, "alpha", c.alpha);
    read(n, "gps_min_step_m", c.gps_min_step_m);
    if (n["peak_gap"]) {
        const auto gap = n["peak_gap"].as<std::string>();
        if (gap == "time") c.peak_gap = dsp::GapMeasure::Time;
        else if (gap == "amplitude") c.peak_gap = dsp::GapMeasure::Amplitude;
        else throw ConfigError("fusion.peak_gap must be 'time' or 'amplitude'");
    }
    if (n["mfcc"]) read_mfcc(n["mfcc"], c.mfcc);
    // Entries replace the default with the same id or add a new one.
    if (n["combinations"]) {
        for (const auto& item : n["combinations"]) {
            fusion::Combination combo{item.first.as<int>(), sensors_of(item.second)};
            auto it = std::find_if(c.combinations.begin(), c.combinations.end(),
                                   [&](const auto& x) { return x.id == combo.id; });
            if (it != c.combinations.end()) *it = combo;
            else c.combinations.push_back(combo);
        }
    }
    if (n["variants"]) {
        for (const auto& item : n["variants"]) {
            fusion::DatasetVariant v{item.first.as<int>(), {}};
            for (const auto& g : item.second) {
                auto group = fusion::parse_group(g.as<std::string>());
                if (!group) throw ConfigError("unknown feature group '" + g.as<std::string>() + "'");
                v.groups.insert(*group);
            }
            auto it = std::find_if(c.variants.begin(), c.variants.end(), [&](const auto& x) { return x.id == v.id; });
            if (it != c.variants.end()) *it = std::move(v);
            else c.variants.push_back(std::move(v));
        }
    }
}

void read_synth(const YAML::Node& n, synth::SynthSpec& s) {
    if (n["stage"]) s.stage = stage_of(n["stage"].as<std::string>());
    read(n, "classes", s.classes);
    read(n, "count", s.count);
    read(n, "seed", s.seed);
    read(n, "duration", s.duration);
    read(n, "motion_rate", s.motion_rate);
    read(n, "audio_rate", s.audio_rate);
    read(n, "audio_seconds", s.audio_seconds);
    read(n, "gps_rate", s.gps_rate);
    read(n, "with_magnet", s.with_magnet);
    read(n, "with_gyro", s.with_gyro);
    read(n, "with_audio", s.with_audio);
    read(n, "with_gps", s.with_gps);
    read(n, "id_prefix", s.id_prefix);
}

void read_stage_spec(const YAML::Node& n, recognizer::StageSpec& s) {
    read(n, "combination", s.combination);
    read(n, "variant", s.variant);
    if (n["kind"]) s.kind = kind_of(n["kind"].as<std::string>());
    read(n, "normalized", s.normalized);
}

void read_train(const YAML::Node& n, harness::ExperimentConfig& e, recognizer::PipelineSpec& p) {
    read(n, "base_iterations", e.base_iterations);
    read(n, "iters_scale", e.iters_scale);
    read(n, "learning_rate", e.train.learning_rate);
    read(n, "target_error", e.train.target_error);
    read(n, "batch_size", e.train.batch_size);
    if (n["l2_lambda"]) e.l2_override = n["l2_lambda"].as<double>();
    p.train = e.train;
    p.l2_override = e.l2_override;
}

}  // namespace

AppConfig parse_config(std::string_view text) {
    AppConfig app;
    auto& e = app.experiment;
    try {
        const YAML::Node root = YAML::Load(std::string(text));
        if (!root.IsMap()) throw ConfigError("config must be a mapping");
        if (!root["version"] || root["version"].as<int>() != kConfigVersion) {
            throw ConfigError("config needs 'version: " + std::to_string(kConfigVersion) + "'");
        }
        static const std::set<std::string> known{"version", "seed",  "split",          "workers", "dataset",
                                                 "grid",    "train", "fusion", "feature_scales", "pipeline"};
        for (const auto& item : root) {
            const auto key = item.first.as<std::string>();
            if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
        }
        read(root, "seed", e.seed);
        read(root, "split", e.split_ratio);
        read(root, "workers", e.workers);
        if (const auto d = root["dataset"]) {
            if (d["dir"]) e.dataset_dir = d["dir"].as<std::string>();
            if (d["synth"]) read_synth(d["synth"], e.synth);
        }
        if (const auto g = root["grid"]) {
            if (g["stages"]) {
                e.stages.clear();
                for (const auto& s : g["stages"]) e.stages.push_back(stage_of(s.as<std::string>()));
            }
            read(g, "combinations", e.combinations);
            read(g, "variants", e.variants);
            if (g["kinds"]) {
                e.kinds.clear();
                for (const auto& k : g["kinds"]) e.kinds.push_back(kind_of(k.as<std::string>()));
            }
            if (g["normalization"]) {
                const auto n = g["normalization"].as<std::string>();
                if (n == "on") e.normalization = harness::Normalization::On;
                else if (n == "off") e.normalization = harness::Normalization::Off;
                else if (n == "both") e.normalization = harness::Normalization::Both;
                else throw ConfigError("grid.normalization must be on, off or both");
            }
        }
        if (root["train"]) read_train(root["train"], e, app.pipeline);
        if (root["fusion"]) read_fusion(root["fusion"], e.fusion);
        if (const auto scales = root["feature_scales"]) {
            for (const auto& item : scales) e.feature_scales[item.first.as<std::string>()] = item.second.as<double>();
        }
        if (const auto p = root["pipeline"]) {
            if (p["adl"]) read_stage_spec(p["adl"], app.pipeline.adl);
            if (p["env"]) read_stage_spec(p["env"], app.pipeline.env);
            if (p["standing"]) read_stage_spec(p["standing"], app.pipeline.standing);
            read(p, "env_soft_scores", app.pipeline.env_soft_scores);
            read(p, "strict_gating", app.recognize.strict_gating);
        }
    } catch (const YAML::Exception& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    if (e.synth.classes.empty()) e.synth.classes = synth::all_classes(e.synth.stage);
    app.pipeline.train.max_iterations = e.max_iterations();
    app.pipeline.train.seed = e.seed;
    e.validate();
    return app;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace adl::config
