#include "adl/json_io.hpp"

#include "adl/error.hpp"

namespace adl::json_io {

std::vector<std::string> sensor_list(const SensorAvailability& s) {
    std::vector<std::string> names;
    for (Sensor sensor : {Sensor::Accel, Sensor::Magnet, Sensor::Gyro, Sensor::Mic, Sensor::Gps}) {
        if (s.has(sensor)) names.emplace_back(sensor_name(sensor));
    }
    return names;
}

SensorAvailability sensors_from_names(const std::vector<std::string>& names) {
    SensorAvailability s;
    for (const auto& n : names) {
        if (n == "accel") s.accel = true;
        else if (n == "magnet") s.magnet = true;
        else if (n == "gyro") s.gyro = true;
        else if (n == "mic") s.mic = true;
        else if (n == "gps") s.gps = true;
        else throw ConfigError("unknown sensor '" + n + "'");
    }
    return s;
}

Json to_json(const audio::MfccConfig& c) {
    Json j;
    j["frame_length"] = c.frame_length;
    j["hop"] = c.hop;
    j["n_mel_filters"] = c.n_mel_filters;
    j["n_coefficients"] = c.n_coefficients;
    j["pre_emphasis"] = c.pre_emphasis;
    j["fmin"] = c.fmin;
    if (c.fmax) j["fmax"] = *c.fmax;
    return j;
}

audio::MfccConfig mfcc_from_json(const nlohmann::json& j) {
    audio::MfccConfig c;
    c.frame_length = j.value("frame_length", c.frame_length);
    c.hop = j.value("hop", c.hop);
    c.n_mel_filters = j.value("n_mel_filters", c.n_mel_filters);
    c.n_coefficients = j.value("n_coefficients", c.n_coefficients);
    c.pre_emphasis = j.value("pre_emphasis", c.pre_emphasis);
    c.fmin = j.value("fmin", c.fmin);
    if (j.contains("fmax")) c.fmax = j.at("fmax").get<double>();
    return c;
}

Json to_json(const fusion::FusionConfig& c) {
    Json j;
    j["alpha"] = c.alpha;
    j["peak_gap"] = c.peak_gap == dsp::GapMeasure::Time ? "time" : "amplitude";
    j["gps_min_step_m"] = c.gps_min_step_m;
    j["mfcc"] = to_json(c.mfcc);
    auto combos = Json::array();
    for (const auto& combo : c.combinations) combos.push_back({{"id", combo.id}, {"sensors", sensor_list(combo.sensors)}});
    j["combinations"] = combos;
    auto variants = Json::array();
    for (const auto& v : c.variants) {
        std::vector<std::string> groups;
        for (auto g : v.groups) groups.emplace_back(fusion::group_name(g));
        variants.push_back({{"id", v.id}, {"groups", groups}});
    }
    j["variants"] = variants;
    return j;
}

fusion::FusionConfig fusion_from_json(const nlohmann::json& j) {
    auto c = fusion::FusionConfig::defaults();
    c.alpha = j.value("alpha", c.alpha);
    const auto gap = j.value("peak_gap", std::string("time"));
    if (gap != "time" && gap != "amplitude") throw ConfigError("peak_gap must be 'time' or 'amplitude'");
    c.peak_gap = gap == "time" ? dsp::GapMeasure::Time : dsp::GapMeasure::Amplitude;
    c.gps_min_step_m = j.value("gps_min_step_m", c.gps_min_step_m);
    if (j.contains("mfcc")) c.mfcc = mfcc_from_json(j.at("mfcc"));
    if (j.contains("combinations")) {
        c.combinations.clear();
        for (const auto& combo : j.at("combinations")) {
            c.combinations.push_back({combo.at("id").get<int>(),
                                      sensors_from_names(combo.at("sensors").get<std::vector<std::string>>())});
        }
    }
    if (j.contains("variants")) {
        c.variants.clear();
        for (const auto& v : j.at("variants")) {
            fusion::DatasetVariant variant{v.at("id").get<int>(), {}};
            for (const auto& name : v.at("groups").get<std::vector<std::string>>()) {
                auto g = fusion::parse_group(name);
                if (!g) throw ConfigError("unknown feature group '" + name + "'");
                variant.groups.insert(*g);
            }
            c.variants.push_back(std::move(variant));
        }
    }
    c.validate();
    return c;
}

Json to_json(const fusion::Normalizer& n) {
    Json j;
    j["names"] = n.names;
    j["mins"] = n.mins;
    j["maxs"] = n.maxs;
    return j;
}

fusion::Normalizer normalizer_from_json(const nlohmann::json& j) {
    fusion::Normalizer n{j.at("names").get<std::vector<std::string>>(), j.at("mins").get<std::vector<double>>(),
                         j.at("maxs").get<std::vector<double>>()};
    if (n.mins.size() != n.names.size() || n.maxs.size() != n.names.size()) {
        throw LoadError("normalizer ranges do not match its feature names");
    }
    return n;
}

}  // namespace adl::json_io
