#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adl/audio.hpp"
#include "adl/ingest.hpp"
#include "adl/labels.hpp"

namespace adl::fusion {

/// Building blocks a dataset variant may include.
enum class FeatureGroup {
    PeakDistances,  // five largest inter-peak gaps per motion sensor
    PeakStats,      // mean/std/var/median of peak amplitudes
    RawStats,       // std/mean/max/min/var/median of the filtered magnitude
    EnvOneHot,      // recognised environment (standing stage only)
    Distance,       // GPS distance traveled (standing stage only)
    Mfcc,
    AudioStats,
};

std::string_view group_name(FeatureGroup group);
std::optional<FeatureGroup> parse_group(std::string_view name);

/// Cumulative sensor sets: 1 = env + accel + gps, 2 = 1 + magnet, 3 = 2 + gyro.
/// The environment context is produced from the microphone, so mic is part of every set.
struct Combination {
    int id = 1;
    SensorAvailability sensors;
};

struct DatasetVariant {
    int id = 1;
    std::set<FeatureGroup> groups;
    bool has(FeatureGroup g) const { return groups.contains(g); }
};

struct FusionConfig {
    std::vector<Combination> combinations;
    std::vector<DatasetVariant> variants;
    double alpha = 0.1;
    dsp::GapMeasure peak_gap = dsp::GapMeasure::Time;
    /// GPS legs shorter than this are ignored; 0 keeps raw summation.
    double gps_min_step_m = 0.0;
    audio::MfccConfig mfcc;

    static FusionConfig defaults();
    const Combination& combination(int id) const;
    const DatasetVariant& variant(int id) const;
    void validate() const;
};

std::vector<Combination> default_combinations();
/// V1 = peak distances; V2 += peak stats; V3 += raw stats; V4 += env one-hot; V5 += distance.
/// Audio groups are part of every default variant.
std::vector<DatasetVariant> default_variants();

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
    Stage stage = Stage::Adl;

    std::size_t size() const { return values.size(); }
    bool operator==(const FeatureVector&) const = default;
};

/// Names (and hence width) of the vector for one (stage, combination, variant).
std::vector<std::string> feature_names(Stage stage, const Combination& combination, const DatasetVariant& variant,
                                       const FusionConfig& config);

/// Sensors a window must provide for the given stage and combination.
SensorAvailability required_sensors(Stage stage, const Combination& combination);

/// Ordered concatenation: [env one-hot] ++ [motion per sensor: accel, magnet, gyro] ++ [distance] ++ [audio].
FeatureVector build_feature_vector(const SensorWindow& window, Stage stage, const Combination& combination,
                                   const DatasetVariant& variant, std::optional<std::string_view> env_label,
                                   const FusionConfig& config);

/// Replaces the env one-hot slots with a score vector (soft environment context).
void apply_env_scores(FeatureVector& vector, std::span<const double> scores);

struct Normalizer {
    std::vector<std::string> names;
    std::vector<double> mins;
    std::vector<double> maxs;
    bool operator==(const Normalizer&) const = default;
};

Normalizer fit_normalizer(std::span<const FeatureVector> vectors);
/// (x - min) / (max - min), 0 for constant features; no clipping.
FeatureVector normalize(const FeatureVector& v, const Normalizer& n);

/// Every combination the device supports crossed with every variant, ordered (combo, variant).
std::vector<std::pair<Combination, DatasetVariant>> enumerate_runs(const SensorAvailability& availability,
                                                                   const FusionConfig& config);

}  // namespace adl::fusion
