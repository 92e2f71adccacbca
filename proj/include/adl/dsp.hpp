#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "adl/ingest.hpp"

namespace adl::dsp {

struct ScalarSeries {
    std::vector<double> samples;
    double rate = 100.0;  // Hz
};

/// Strict local maxima of a series.
struct PeakSet {
    std::vector<std::size_t> indices;
    std::vector<double> amplitudes;
};

struct Stats {
    double mean = 0.0;
    double std = 0.0;
    double var = 0.0;
    double max = 0.0;
    double min = 0.0;
    double median = 0.0;
};

struct MotionFeatures {
    std::array<double, 5> five_peak_distances{};  // seconds, descending
    double peak_mean = 0.0;
    double peak_std = 0.0;
    double peak_var = 0.0;
    double peak_median = 0.0;
    Stats raw;

    static constexpr std::size_t kValueCount = 15;
};

inline constexpr double kDefaultAlpha = 0.1;

/// How "distance between peaks" is measured.
enum class GapMeasure { Time, Amplitude };

/// y[0] = x[0], y[n] = alpha * x[n] + (1 - alpha) * y[n-1].
ScalarSeries low_pass(const ScalarSeries& series, double alpha);

ScalarSeries magnitude(const TriaxialStream& stream);

/// Sampling rate implied by the first and last timestamps; `fallback` for fewer than two samples.
double estimate_rate(const TriaxialStream& stream, double fallback = 100.0);

/// Indices i with x[i-1] < x[i] > x[i+1]. Endpoints and plateaus are never peaks.
PeakSet detect_max_peaks(const ScalarSeries& series);

/// Gaps between consecutive peaks in seconds, largest five, zero-padded.
std::array<double, 5> peak_distance_features(const PeakSet& peaks, double rate);
/// Alternative reading of "distance": |amplitude difference| between consecutive peaks.
std::array<double, 5> peak_amplitude_gap_features(const PeakSet& peaks);

/// Population statistics (variance divides by N). Throws DomainError on empty input.
Stats descriptive_stats(std::span<const double> values);

/// magnitude -> low_pass -> peaks; peak statistics are 0 when no peak exists.
MotionFeatures motion_features(const SensorWindow& window, Sensor sensor, double alpha = kDefaultAlpha,
                               GapMeasure gaps = GapMeasure::Time);

}  // namespace adl::dsp
