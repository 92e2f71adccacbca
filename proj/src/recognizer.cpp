#include "adl/recognizer.hpp"

#include <fstream>
#include <sstream>

#include "adl/error.hpp"
#include "adl/json_io.hpp"

namespace adl::recognizer {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

template <typename Label>
StageOutput<Label> to_output(const ann::Prediction& p) {
    return {static_cast<Label>(p.label), p.scores};
}

std::string model_file(Stage s) { return std::string(stage_key(s)) + ".model.json"; }

template <typename Label>
json_io::Json output_json(Stage stage, const StageOutput<Label>& out) {
    json_io::Json j;
    j["label"] = std::string(class_name(stage, static_cast<std::size_t>(out.label)));
    j["scores"] = out.scores;
    return j;
}

}  // namespace

const StageModel& PipelineModel::stage(Stage s) const {
    switch (s) {
        case Stage::Adl: return adl;
        case Stage::Env: return env;
        case Stage::Standing: return standing;
    }
    return adl;
}

void PipelineModel::validate() const {
    fusion.validate();
    for (Stage s : {Stage::Adl, Stage::Env, Stage::Standing}) {
        const auto& m = stage(s);
        const std::string name(stage_key(s));
        if (m.stage != s) throw ConfigError("pipeline slot " + name + " holds a model for another stage");
        const auto names = fusion::feature_names(s, fusion.combination(m.combination), fusion.variant(m.variant), fusion);
        if (m.net.topology.inputs() != names.size()) {
            throw ConfigError("stage " + name + ": network input width does not match the feature recipe");
        }
        if (m.net.topology.outputs() != class_count(s)) throw ConfigError("stage " + name + ": wrong number of classes");
        if (m.normalizer && m.normalizer->names != names) {
            throw ConfigError("stage " + name + ": normalizer does not match the feature recipe");
        }
    }
}

ann::Prediction run_stage(const SensorWindow& window, const StageModel& model, const fusion::FusionConfig& fusion,
                          std::optional<std::string_view> env_label, const std::vector<double>* env_scores) {
    auto v = fusion::build_feature_vector(window, model.stage, fusion.combination(model.combination),
                                          fusion.variant(model.variant), env_label, fusion);
    if (env_scores) fusion::apply_env_scores(v, *env_scores);
    if (model.normalizer) v = fusion::normalize(v, *model.normalizer);
    return ann::predict(model.net, v.values);
}

StageOutput<AdlLabel> recognize_stage1(const SensorWindow& window, const PipelineModel& model) {
    return to_output<AdlLabel>(run_stage(window, model.adl, model.fusion));
}

StageOutput<EnvLabel> recognize_stage2(const SensorWindow& window, const PipelineModel& model) {
    if (!window.audio) throw SensorUnavailableError("mic", "env");
    return to_output<EnvLabel>(run_stage(window, model.env, model.fusion));
}

StageOutput<StandingLabel> recognize_stage3(const SensorWindow& window, const StageOutput<EnvLabel>& env,
                                            const PipelineModel& model) {
    if (!window.gps) throw SensorUnavailableError("gps", "standing");
    const auto env_name = class_name(Stage::Env, static_cast<std::size_t>(env.label));
    return to_output<StandingLabel>(
        run_stage(window, model.standing, model.fusion, env_name, model.env_soft_scores ? &env.scores : nullptr));
}

ActivityResult recognize(const SensorWindow& window, const PipelineModel& model, const RecognizeOptions& options) {
    ActivityResult result;
    result.adl = recognize_stage1(window, model);
    result.combination = model.adl.combination;
    result.variant = model.adl.variant;
    if (window.audio) {
        result.environment = recognize_stage2(window, model);
        result.combination = model.env.combination;
        result.variant = model.env.variant;
    }
    if (result.adl.label != AdlLabel::Standing) return result;
    if (!result.environment) {
        if (options.strict_gating) throw SensorUnavailableError("mic", "standing");
        return result;
    }
    if (!window.gps) {
        if (options.strict_gating) throw SensorUnavailableError("gps", "standing");
        return result;
    }
    result.standing = recognize_stage3(window, *result.environment, model);
    result.combination = model.standing.combination;
    result.variant = model.standing.variant;
    return result;
}

StageData collect_stage_data(std::span<const SensorWindow> windows, Stage stage, int combination, int variant,
                             const fusion::FusionConfig& fusion) {
    const auto& combo = fusion.combination(combination);
    const auto& recipe = fusion.variant(variant);
    const auto need = fusion::required_sensors(stage, combo);
    StageData data;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        auto label = w.label(stage);
        if (!label || !SensorAvailability::of(w).covers(need)) continue;
        auto index = class_index(stage, *label);
        if (!index) throw ValidationError("window '" + w.window_id + "' has unknown " + std::string(stage_key(stage)) + " label '" + *label + "'");
        std::optional<std::string_view> env;
        std::optional<std::string> env_label = w.label(Stage::Env);
        if (stage == Stage::Standing && env_label) env = *env_label;
        data.vectors.push_back(fusion::build_feature_vector(w, stage, combo, recipe, env, fusion));
        data.labels.push_back(*index);
        data.window_index.push_back(i);
    }
    return data;
}

StageModel train_stage(const StageData& data, Stage stage, const StageSpec& spec, const ann::TrainConfig& train,
                       std::optional<double> l2_override, ann::TrainResult* details) {
    if (data.vectors.empty()) throw ConfigError("no training windows for stage " + std::string(stage_key(stage)));
    StageModel model;
    model.stage = stage;
    model.combination = spec.combination;
    model.variant = spec.variant;
    model.kind = spec.kind;
    if (spec.normalized) model.normalizer = fusion::fit_normalizer(data.vectors);

    std::vector<ann::Sample> samples;
    samples.reserve(data.vectors.size());
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        const auto& v = model.normalizer ? fusion::normalize(data.vectors[i], *model.normalizer) : data.vectors[i];
        samples.push_back({v.values, data.labels[i]});
    }
    const auto p = ann::preset(spec.kind, data.vectors.front().size(), class_count(stage));
    ann::TrainConfig config = train;
    config.l2_lambda = l2_override.value_or(p.l2_lambda);
    auto net = ann::init_network(p.topology, config.seed, p.init);
    net.kind = spec.kind;
    auto result = ann::train(std::move(net), samples, config);
    model.net = result.net;
    if (details) *details = std::move(result);
    return model;
}

PipelineModel train_pipeline(std::span<const SensorWindow> windows, const PipelineSpec& spec,
                             const fusion::FusionConfig& fusion) {
    fusion.validate();
    PipelineModel model;
    model.fusion = fusion;
    model.env_soft_scores = spec.env_soft_scores;
    auto fit = [&](Stage stage, const StageSpec& s) {
        const auto data = collect_stage_data(windows, stage, s.combination, s.variant, fusion);
        return train_stage(data, stage, s, spec.train, spec.l2_override);
    };
    model.adl = fit(Stage::Adl, spec.adl);
    model.env = fit(Stage::Env, spec.env);
    model.standing = fit(Stage::Standing, spec.standing);
    return model;
}

void save_bundle(const std::filesystem::path& dir, const PipelineModel& model) {
    std::filesystem::create_directories(dir);
    json_io::Json manifest;
    manifest["format_version"] = kBundleFormatVersion;
    manifest["env_soft_scores"] = model.env_soft_scores;
    manifest["fusion"] = json_io::to_json(model.fusion);
    auto stages = json_io::Json::array();
    for (Stage s : {Stage::Adl, Stage::Env, Stage::Standing}) {
        const auto& m = model.stage(s);
        json_io::Json entry;
        entry["stage"] = std::string(stage_key(s));
        entry["model"] = model_file(s);
        entry["kind"] = std::string(ann::kind_name(m.kind));
        entry["combination"] = m.combination;
        entry["variant"] = m.variant;
        entry["normalized"] = m.normalizer.has_value();
        if (m.normalizer) entry["normalizer"] = json_io::to_json(*m.normalizer);
        stages.push_back(std::move(entry));
        write_file(dir / model_file(s), ann::save_model(m.net));
    }
    manifest["stages"] = std::move(stages);
    write_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

PipelineModel load_bundle(const std::filesystem::path& dir) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("bundle manifest is not readable: ") + e.what());
    }
    try {
        if (manifest.at("format_version").get<int>() != kBundleFormatVersion) throw LoadError("unsupported bundle format version");
        PipelineModel model;
        model.fusion = json_io::fusion_from_json(manifest.at("fusion"));
        model.env_soft_scores = manifest.value("env_soft_scores", false);
        bool seen[3] = {false, false, false};
        for (const auto& entry : manifest.at("stages")) {
            auto stage = parse_stage(entry.at("stage").get<std::string>());
            if (!stage) throw LoadError("unknown stage in bundle manifest");
            StageModel m;
            m.stage = *stage;
            auto kind = ann::parse_kind(entry.at("kind").get<std::string>());
            if (!kind) throw LoadError("unknown model kind in bundle manifest");
            m.kind = *kind;
            m.combination = entry.at("combination").get<int>();
            m.variant = entry.at("variant").get<int>();
            if (entry.at("normalized").get<bool>()) m.normalizer = json_io::normalizer_from_json(entry.at("normalizer"));
            m.net = ann::load_model(read_file(dir / entry.at("model").get<std::string>()));
            seen[static_cast<int>(*stage)] = true;
            switch (*stage) {
                case Stage::Adl: model.adl = std::move(m); break;
                case Stage::Env: model.env = std::move(m); break;
                case Stage::Standing: model.standing = std::move(m); break;
            }
        }
        if (!seen[0] || !seen[1] || !seen[2]) throw LoadError("bundle must contain adl, env and standing models");
        try {
            model.validate();
        } catch (const ConfigError& e) {
            throw LoadError(e.what());
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("bundle manifest is malformed: ") + e.what());
    }
}

std::string result_to_json(const ActivityResult& r) {
    json_io::Json j;
    j["adl"] = output_json(Stage::Adl, r.adl);
    j["environment"] = r.environment ? output_json(Stage::Env, *r.environment) : json_io::Json(nullptr);
    j["standing"] = r.standing ? output_json(Stage::Standing, *r.standing) : json_io::Json(nullptr);
    j["combination"] = r.combination;
    j["variant"] = r.variant;
    return j.dump() + "\n";
}

std::string result_to_text(const ActivityResult& r) {
    std::ostringstream out;
    out << "adl: " << class_name(Stage::Adl, static_cast<std::size_t>(r.adl.label)) << '\n';
    out << "environment: "
        << (r.environment ? std::string(class_name(Stage::Env, static_cast<std::size_t>(r.environment->label))) : "-")
        << '\n';
    out << "standing: "
        << (r.standing ? std::string(class_name(Stage::Standing, static_cast<std::size_t>(r.standing->label))) : "-")
        << '\n';
    out << "combination: " << r.combination << ", variant: " << r.variant << '\n';
    return out.str();
}

}  // namespace adl::recognizer
