#include "adl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "adl/error.hpp"
#include "adl/geo.hpp"

namespace adl::synth {

namespace {

using std::numbers::pi;

struct Gravity {
    double x, y, z;
};

constexpr Gravity kGravity{0.0, 0.0, 9.81};
constexpr Gravity kEarthField{22.0, 5.0, -40.0};  // uT

struct WindowPlan {
    std::string adl;
    std::string env;
    std::string standing;  // empty unless adl == standing
};

TriaxialStream oscillate(std::mt19937_64& rng, const MotionRecipe& r, double amp, Gravity base, double noise_sd,
                         double rate, double duration, double freq_scale, double amp_scale) {
    std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
    const double f = r.freq_hz * freq_scale;
    const double a = amp * amp_scale;
    const auto n = static_cast<std::size_t>(std::lround(duration * rate));
    TriaxialStream out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        const double w = 2.0 * pi * f * t;
        double vertical = a * std::sin(w + p1);
        if (r.vibration_amp > 0.0) vertical += r.vibration_amp * amp_scale * std::sin(2.0 * pi * r.vibration_hz * t + p3);
        const double lateral = 0.3 * a * std::sin(w + p2);
        auto jitter = [&] { return noise_sd > 0.0 ? noise(rng) : 0.0; };
        out.push_back({t, base.x + lateral + jitter(), base.y + 0.5 * lateral + jitter(), base.z + vertical + jitter()});
    }
    return out;
}

AudioStream render_audio(std::mt19937_64& rng, const AudioRecipe& r, double rate, double seconds) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    std::uniform_real_distribution<double> gain(0.85, 1.15);
    std::vector<double> phases;
    for (std::size_t i = 0; i < r.tones_hz.size(); ++i) phases.push_back(phase(rng));
    const double tone_amp = r.tone_amp * gain(rng);
    const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
    AudioStream out{std::vector<double>(n), rate};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        double v = r.noise_amp * noise(rng);
        for (std::size_t k = 0; k < r.tones_hz.size(); ++k) v += tone_amp * std::sin(2.0 * pi * r.tones_hz[k] * t + phases[k]);
        out.samples[i] = std::clamp(v, -1.0, 1.0);
    }
    return out;
}

std::vector<GpsSample> render_track(std::mt19937_64& rng, double speed_mps, double rate, double duration) {
    std::uniform_real_distribution<double> lat0(-60.0, 60.0), lon0(-170.0, 170.0), heading(0.0, 2.0 * pi);
    std::uniform_real_distribution<double> speed_scale(0.8, 1.2);
    std::normal_distribution<double> jitter(0.0, 0.5);  // metres
    double lat = lat0(rng), lon = lon0(rng);
    const double h = heading(rng);
    const double v = speed_mps * speed_scale(rng);
    const auto n = static_cast<std::size_t>(std::floor(duration * rate));
    std::vector<GpsSample> track;
    constexpr double kRadToDeg = 180.0 / pi;
    for (std::size_t i = 0; i < std::max<std::size_t>(n, 1); ++i) {
        const double t = static_cast<double>(i) / rate;
        const double north = v * t * std::cos(h) + jitter(rng);
        const double east = v * t * std::sin(h) + jitter(rng);
        const double plat = lat + north / geo::kEarthRadiusM * kRadToDeg;
        const double plon = lon + east / (geo::kEarthRadiusM * std::cos(lat / kRadToDeg)) * kRadToDeg;
        track.push_back({t, plat, plon});
    }
    return track;
}

const MotionRecipe& motion_for(const Recipes& recipes, const WindowPlan& plan) {
    if (!plan.standing.empty()) {
        if (auto it = recipes.standing.find(plan.standing); it != recipes.standing.end()) return it->second;
        throw ConfigError("no recipe for standing activity '" + plan.standing + "'");
    }
    if (auto it = recipes.adl.find(plan.adl); it != recipes.adl.end()) return it->second;
    throw ConfigError("no recipe for activity '" + plan.adl + "'");
}

}  // namespace

Recipes Recipes::defaults() {
    Recipes r;
    //                        freq  accel  magnet gyro  vib_hz vib_amp noise speed
    r.adl["walking"] = {1.9, 2.5, 3.0, 0.8, 0.0, 0.0, 0.15, 1.4};
    r.adl["running"] = {2.8, 7.0, 6.0, 2.0, 0.0, 0.0, 0.30, 3.5};
    r.adl["standing"] = {0.25, 0.03, 0.2, 0.02, 0.0, 0.0, 0.02, 0.0};
    r.adl["going_upstairs"] = {1.5, 3.5, 4.0, 1.0, 0.0, 0.0, 0.15, 0.5};
    r.adl["going_downstairs"] = {2.2, 4.5, 4.5, 1.3, 0.0, 0.0, 0.20, 0.6};

    r.standing["watching_tv"] = {0.2, 0.06, 0.3, 0.03, 0.0, 0.0, 0.02, 0.0};
    r.standing["sleeping"] = {0.25, 0.01, 0.05, 0.005, 0.0, 0.0, 0.005, 0.0};
    r.standing["driving"] = {0.7, 0.5, 1.5, 0.1, 12.0, 0.4, 0.10, 14.0};

    r.env["bar"] = {{300.0, 620.0}, 0.10, 0.08};
    r.env["classroom"] = {{180.0}, 0.15, 0.01};
    r.env["gym"] = {{90.0, 2200.0}, 0.20, 0.05};
    r.env["kitchen"] = {{2600.0}, 0.12, 0.03};
    r.env["library"] = {{}, 0.0, 0.003};
    r.env["street"] = {{}, 0.0, 0.25};
    r.env["hall"] = {{450.0, 900.0, 1350.0}, 0.08, 0.02};
    r.env["watching_tv_room"] = {{1000.0, 1500.0}, 0.10, 0.02};
    r.env["bedroom"] = {{60.0}, 0.03, 0.004};
    return r;
}

std::string home_environment(const std::string& standing_activity) {
    if (standing_activity == "watching_tv") return "watching_tv_room";
    if (standing_activity == "sleeping") return "bedroom";
    if (standing_activity == "driving") return "street";
    throw ConfigError("unknown standing activity '" + standing_activity + "'");
}

std::vector<std::string> all_classes(Stage stage) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < class_count(stage); ++i) out.emplace_back(class_name(stage, i));
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over a mix of both inputs
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<SensorWindow> synthesize_dataset(const SynthSpec& spec) {
    const auto& classes = spec.classes;
    if (classes.empty()) throw ConfigError("synthesis needs a non-empty class list");
    for (const auto& c : classes) {
        if (!class_index(spec.stage, c)) {
            throw ConfigError("'" + c + "' is not a " + std::string(stage_key(spec.stage)) + " class");
        }
    }
    if (spec.count < classes.size()) throw ConfigError("count must be at least the number of classes");
    if (!(spec.duration > 0.0 && spec.motion_rate > 0.0 && spec.audio_rate > 0.0 && spec.gps_rate > 0.0 &&
          spec.audio_seconds > 0.0)) {
        throw ConfigError("synthesis rates and durations must be positive");
    }

    std::vector<SensorWindow> windows;
    windows.reserve(spec.count);
    const int width = std::max(4, static_cast<int>(std::to_string(spec.count).size()));
    for (std::size_t i = 0; i < spec.count; ++i) {
        std::mt19937_64 rng(derive_seed(spec.seed, i));
        std::uniform_int_distribution<std::size_t> pick_adl(0, kAdlNames.size() - 1), pick_env(0, kEnvNames.size() - 1),
            pick_standing(0, kStandingNames.size() - 1);

        WindowPlan plan;
        const std::string& cls = classes[i % classes.size()];
        switch (spec.stage) {
            case Stage::Adl:
                plan.adl = cls;
                if (plan.adl == "standing") {
                    plan.standing = std::string(kStandingNames[pick_standing(rng)]);
                    plan.env = home_environment(plan.standing);
                } else {
                    plan.env = std::string(kEnvNames[pick_env(rng)]);
                }
                break;
            case Stage::Env:
                plan.env = cls;
                plan.adl = std::string(kAdlNames[pick_adl(rng)]);
                if (plan.adl == "standing") plan.standing = std::string(kStandingNames[pick_standing(rng)]);
                break;
            case Stage::Standing:
                plan.adl = "standing";
                plan.standing = cls;
                plan.env = home_environment(cls);
                break;
        }

        const MotionRecipe& motion = motion_for(spec.recipes, plan);
        std::uniform_real_distribution<double> freq_scale(0.95, 1.05), amp_scale(0.85, 1.15);
        const double fs = freq_scale(rng), as = amp_scale(rng);

        SensorWindow w;
        char id[32];
        std::snprintf(id, sizeof id, "%0*zu", width, i);
        w.window_id = spec.id_prefix + id;
        w.duration = spec.duration;
        w.accel = oscillate(rng, motion, motion.accel_amp, kGravity, motion.noise, spec.motion_rate, spec.duration, fs, as);
        if (spec.with_magnet) {
            w.magnet = oscillate(rng, motion, motion.magnet_amp, kEarthField, 0.2, spec.motion_rate, spec.duration, fs, as);
        }
        if (spec.with_gyro) {
            w.gyro = oscillate(rng, motion, motion.gyro_amp, {0.0, 0.0, 0.0}, 0.01, spec.motion_rate, spec.duration, fs, as);
        }
        if (spec.with_audio) {
            auto it = spec.recipes.env.find(plan.env);
            if (it == spec.recipes.env.end()) throw ConfigError("no audio recipe for environment '" + plan.env + "'");
            w.audio = render_audio(rng, it->second, spec.audio_rate, std::min(spec.audio_seconds, spec.duration));
        }
        if (spec.with_gps) w.gps = render_track(rng, motion.speed_mps, spec.gps_rate, spec.duration);

        w.labels["adl"] = plan.adl;
        w.labels["env"] = plan.env;
        if (!plan.standing.empty()) w.labels["standing"] = plan.standing;
        windows.push_back(std::move(w));
    }
    return windows;
}

}  // namespace adl::synth
