#include "adl/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "adl/dsp.hpp"
#include "adl/error.hpp"
#include "adl/geo.hpp"

namespace adl::fusion {

namespace {

constexpr std::array<Sensor, 3> kMotionOrder{Sensor::Accel, Sensor::Magnet, Sensor::Gyro};
constexpr std::array<std::string_view, 4> kPeakStatNames{"peak_mean", "peak_std", "peak_var", "peak_median"};
constexpr std::array<std::string_view, 6> kRawStatNames{"raw_std", "raw_mean", "raw_max",
                                                        "raw_min", "raw_var", "raw_median"};

bool uses_env_context(Stage stage, const Combination&, const DatasetVariant& variant) {
    return stage == Stage::Standing && variant.has(FeatureGroup::EnvOneHot);
}

bool uses_distance(Stage stage, const Combination& c, const DatasetVariant& variant) {
    return stage == Stage::Standing && c.sensors.gps && variant.has(FeatureGroup::Distance);
}

bool uses_motion(Stage stage) { return stage != Stage::Env; }

std::array<double, 6> raw_values(const dsp::Stats& s) { return {s.std, s.mean, s.max, s.min, s.var, s.median}; }

struct Builder {
    FeatureVector out;
    void add(std::string name, double value) {
        out.names.push_back(std::move(name));
        out.values.push_back(value);
    }
};

}  // namespace

std::string_view group_name(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::PeakDistances: return "peak_distances";
        case FeatureGroup::PeakStats: return "peak_stats";
        case FeatureGroup::RawStats: return "raw_stats";
        case FeatureGroup::EnvOneHot: return "env_onehot";
        case FeatureGroup::Distance: return "distance";
        case FeatureGroup::Mfcc: return "mfcc";
        case FeatureGroup::AudioStats: return "audio_stats";
    }
    return "";
}

std::optional<FeatureGroup> parse_group(std::string_view name) {
    for (auto g : {FeatureGroup::PeakDistances, FeatureGroup::PeakStats, FeatureGroup::RawStats,
                   FeatureGroup::EnvOneHot, FeatureGroup::Distance, FeatureGroup::Mfcc, FeatureGroup::AudioStats}) {
        if (group_name(g) == name) return g;
    }
    return std::nullopt;
}

std::vector<Combination> default_combinations() {
    SensorAvailability base{.accel = true, .mic = true, .gps = true};
    SensorAvailability with_magnet = base;
    with_magnet.magnet = true;
    SensorAvailability with_gyro = with_magnet;
    with_gyro.gyro = true;
    return {{1, base}, {2, with_magnet}, {3, with_gyro}};
}

std::vector<DatasetVariant> default_variants() {
    std::set<FeatureGroup> groups{FeatureGroup::PeakDistances, FeatureGroup::Mfcc, FeatureGroup::AudioStats};
    std::vector<DatasetVariant> variants;
    variants.push_back({1, groups});
    for (auto next : {FeatureGroup::PeakStats, FeatureGroup::RawStats, FeatureGroup::EnvOneHot, FeatureGroup::Distance}) {
        groups.insert(next);
        variants.push_back({static_cast<int>(variants.size()) + 1, groups});
    }
    return variants;
}

FusionConfig FusionConfig::defaults() {
    FusionConfig c;
    c.combinations = default_combinations();
    c.variants = default_variants();
    return c;
}

const Combination& FusionConfig::combination(int id) const {
    for (const auto& c : combinations) {
        if (c.id == id) return c;
    }
    throw ConfigError("unknown sensor combination " + std::to_string(id));
}

const DatasetVariant& FusionConfig::variant(int id) const {
    for (const auto& v : variants) {
        if (v.id == id) return v;
    }
    throw ConfigError("unknown dataset variant " + std::to_string(id));
}

void FusionConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("fusion.alpha must lie in (0, 1]");
    if (!(gps_min_step_m >= 0.0)) throw ConfigError("fusion.gps_min_step_m must be >= 0");
    for (const auto& c : combinations) {
        if (!c.sensors.accel) throw ConfigError("combination " + std::to_string(c.id) + " lacks the accelerometer");
    }
    for (const auto& v : variants) {
        if (v.groups.empty()) throw ConfigError("variant " + std::to_string(v.id) + " has no feature group");
    }
}

SensorAvailability required_sensors(Stage stage, const Combination& c) {
    SensorAvailability need;
    switch (stage) {
        case Stage::Adl:
            need.accel = c.sensors.accel;
            need.magnet = c.sensors.magnet;
            need.gyro = c.sensors.gyro;
            break;
        case Stage::Env:
            need.mic = true;
            break;
        case Stage::Standing:
            need = c.sensors;
            need.mic = false;  // the environment arrives as a label, not as audio
            break;
    }
    return need;
}

std::vector<std::string> feature_names(Stage stage, const Combination& c, const DatasetVariant& v,
                                       const FusionConfig& config) {
    std::vector<std::string> names;
    if (uses_env_context(stage, c, v)) {
        for (auto env : kEnvNames) names.push_back("env." + std::string(env));
    }
    if (uses_motion(stage)) {
        for (Sensor s : kMotionOrder) {
            if (!c.sensors.has(s)) continue;
            const std::string prefix = std::string(sensor_name(s)) + ".";
            if (v.has(FeatureGroup::PeakDistances)) {
                for (int i = 0; i < 5; ++i) names.push_back(prefix + "peak_gap" + std::to_string(i));
            }
            if (v.has(FeatureGroup::PeakStats)) {
                for (auto n : kPeakStatNames) names.push_back(prefix + std::string(n));
            }
            if (v.has(FeatureGroup::RawStats)) {
                for (auto n : kRawStatNames) names.push_back(prefix + std::string(n));
            }
        }
    }
    if (uses_distance(stage, c, v)) names.push_back("gps.distance");
    if (stage == Stage::Env) {
        if (v.has(FeatureGroup::Mfcc)) {
            for (std::size_t i = 0; i < config.mfcc.n_coefficients; ++i) names.push_back("mic.mfcc" + std::to_string(i));
        }
        if (v.has(FeatureGroup::AudioStats)) {
            for (auto n : kRawStatNames) names.push_back("mic." + std::string(n));
        }
    }
    return names;
}

FeatureVector build_feature_vector(const SensorWindow& window, Stage stage, const Combination& c,
                                   const DatasetVariant& v, std::optional<std::string_view> env_label,
                                   const FusionConfig& config) {
    const auto need = required_sensors(stage, c);
    const auto have = SensorAvailability::of(window);
    for (Sensor s : {Sensor::Accel, Sensor::Magnet, Sensor::Gyro, Sensor::Mic, Sensor::Gps}) {
        if (need.has(s) && !have.has(s)) throw SensorUnavailableError(std::string(sensor_name(s)), std::string(stage_key(stage)));
    }

    Builder b;
    b.out.stage = stage;
    if (uses_env_context(stage, c, v)) {
        if (!env_label) throw DomainError("standing-stage features need the recognised environment");
        auto index = class_index(Stage::Env, *env_label);
        if (!index) throw DomainError("unknown environment label '" + std::string(*env_label) + "'");
        for (std::size_t i = 0; i < kEnvNames.size(); ++i) {
            b.add("env." + std::string(kEnvNames[i]), i == *index ? 1.0 : 0.0);
        }
    }
    if (uses_motion(stage)) {
        for (Sensor s : kMotionOrder) {
            if (!c.sensors.has(s)) continue;
            const auto f = dsp::motion_features(window, s, config.alpha, config.peak_gap);
            const std::string prefix = std::string(sensor_name(s)) + ".";
            if (v.has(FeatureGroup::PeakDistances)) {
                for (int i = 0; i < 5; ++i) b.add(prefix + "peak_gap" + std::to_string(i), f.five_peak_distances[i]);
            }
            if (v.has(FeatureGroup::PeakStats)) {
                const std::array<double, 4> ps{f.peak_mean, f.peak_std, f.peak_var, f.peak_median};
                for (std::size_t i = 0; i < ps.size(); ++i) b.add(prefix + std::string(kPeakStatNames[i]), ps[i]);
            }
            if (v.has(FeatureGroup::RawStats)) {
                const auto rs = raw_values(f.raw);
                for (std::size_t i = 0; i < rs.size(); ++i) b.add(prefix + std::string(kRawStatNames[i]), rs[i]);
            }
        }
    }
    if (uses_distance(stage, c, v)) {
        b.add("gps.distance", geo::distance_traveled(*window.gps, config.gps_min_step_m));
    }
    if (stage == Stage::Env && (v.has(FeatureGroup::Mfcc) || v.has(FeatureGroup::AudioStats))) {
        const auto af = audio::audio_features(window, config.mfcc);
        if (v.has(FeatureGroup::Mfcc)) {
            for (std::size_t i = 0; i < af.mfcc.size(); ++i) b.add("mic.mfcc" + std::to_string(i), af.mfcc[i]);
        }
        if (v.has(FeatureGroup::AudioStats)) {
            const auto rs = raw_values(af.raw);
            for (std::size_t i = 0; i < rs.size(); ++i) b.add("mic." + std::string(kRawStatNames[i]), rs[i]);
        }
    }
    if (b.out.values.empty()) throw ConfigError("variant " + std::to_string(v.id) + " selects no feature for this stage");
    return std::move(b.out);
}

void apply_env_scores(FeatureVector& vector, std::span<const double> scores) {
    if (scores.size() != kEnvNames.size()) throw DomainError("environment scores need 9 entries");
    for (std::size_t i = 0; i < kEnvNames.size(); ++i) {
        auto it = std::find(vector.names.begin(), vector.names.end(), "env." + std::string(kEnvNames[i]));
        if (it == vector.names.end()) return;
        vector.values[static_cast<std::size_t>(it - vector.names.begin())] = scores[i];
    }
}

Normalizer fit_normalizer(std::span<const FeatureVector> vectors) {
    if (vectors.empty()) throw DomainError("fit_normalizer: no training vectors");
    Normalizer n{vectors.front().names, vectors.front().values, vectors.front().values};
    for (const auto& v : vectors) {
        if (v.names != n.names) throw DomainError("fit_normalizer: inconsistent feature names");
        for (std::size_t i = 0; i < v.values.size(); ++i) {
            n.mins[i] = std::min(n.mins[i], v.values[i]);
            n.maxs[i] = std::max(n.maxs[i], v.values[i]);
        }
    }
    return n;
}

FeatureVector normalize(const FeatureVector& v, const Normalizer& n) {
    if (v.names != n.names) throw DomainError("normalize: feature names do not match the normalizer");
    FeatureVector out = v;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double range = n.maxs[i] - n.mins[i];
        out.values[i] = range > 0.0 ? (v.values[i] - n.mins[i]) / range : 0.0;
    }
    return out;
}

std::vector<std::pair<Combination, DatasetVariant>> enumerate_runs(const SensorAvailability& availability,
                                                                   const FusionConfig& config) {
    if (!availability.accel) throw UnsupportedDeviceError("an accelerometer is required for every sensor combination");
    auto combos = config.combinations;
    auto variants = config.variants;
    std::sort(combos.begin(), combos.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(variants.begin(), variants.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::vector<std::pair<Combination, DatasetVariant>> runs;
    for (const auto& c : combos) {
        if (!availability.covers(c.sensors)) continue;
        for (const auto& v : variants) runs.emplace_back(c, v);
    }
    return runs;
}

}  // namespace adl::fusion
