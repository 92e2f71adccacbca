#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adl/ingest.hpp"
#include "adl/labels.hpp"

namespace adl::synth {

/// Periodic body motion plus sensor noise; speed drives the GPS track.
struct MotionRecipe {
    double freq_hz = 0.0;      // dominant oscillation (0 = none)
    double accel_amp = 0.0;    // m/s^2
    double magnet_amp = 0.0;   // uT
    double gyro_amp = 0.0;     // rad/s
    double vibration_hz = 0.0; // secondary high-frequency component
    double vibration_amp = 0.0;
    double noise = 0.0;        // accel noise sd, m/s^2
    double speed_mps = 0.0;
};

/// Acoustic scene: a few tones over white noise.
struct AudioRecipe {
    std::vector<double> tones_hz;
    double tone_amp = 0.0;
    double noise_amp = 0.0;
};

struct Recipes {
    std::map<std::string, MotionRecipe> adl;       // keyed by ADL name
    std::map<std::string, MotionRecipe> standing;  // keyed by standing activity
    std::map<std::string, AudioRecipe> env;        // keyed by environment

    static Recipes defaults();
};

/// Environment a standing activity takes place in.
std::string home_environment(const std::string& standing_activity);

struct SynthSpec {
    Stage stage = Stage::Standing;  // which label is balanced
    std::vector<std::string> classes;  // must be non-empty; see all_classes()
    std::size_t count = 300;
    std::uint64_t seed = 1;
    Recipes recipes = Recipes::defaults();
    double duration = 5.0;
    double motion_rate = 100.0;
    double audio_rate = 8000.0;
    double audio_seconds = 1.0;  // recorded clip length within the window
    double gps_rate = 1.0;
    bool with_magnet = true;
    bool with_gyro = true;
    bool with_audio = true;
    bool with_gps = true;
    std::string id_prefix = "w";
};

std::vector<std::string> all_classes(Stage stage);

/// Deterministic labelled windows; the balanced label cycles through `classes`.
std::vector<SensorWindow> synthesize_dataset(const SynthSpec& spec);

/// Stream of independent 64-bit seeds derived from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace adl::synth
