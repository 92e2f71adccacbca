#include "adl/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "adl/error.hpp"

namespace adl::dsp {

ScalarSeries low_pass(const ScalarSeries& series, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("low-pass alpha must lie in (0, 1]");
    if (series.samples.empty()) throw DomainError("low_pass: empty series");
    ScalarSeries out{std::vector<double>(series.samples.size()), series.rate};
    const double keep = 1.0 - alpha;
    out.samples[0] = series.samples[0];
    for (std::size_t n = 1; n < series.samples.size(); ++n) {
        out.samples[n] = alpha * series.samples[n] + keep * out.samples[n - 1];
    }
    return out;
}

double estimate_rate(const TriaxialStream& stream, double fallback) {
    if (stream.size() < 2) return fallback;
    const double span = stream.back().t - stream.front().t;
    return span > 0.0 ? static_cast<double>(stream.size() - 1) / span : fallback;
}

ScalarSeries magnitude(const TriaxialStream& stream) {
    if (stream.empty()) throw DomainError("magnitude: empty stream");
    ScalarSeries out{{}, estimate_rate(stream)};
    out.samples.reserve(stream.size());
    for (const auto& s : stream) out.samples.push_back(std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z));
    return out;
}

PeakSet detect_max_peaks(const ScalarSeries& series) {
    PeakSet peaks;
    const auto& x = series.samples;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i - 1] < x[i] && x[i] > x[i + 1]) {
            peaks.indices.push_back(i);
            peaks.amplitudes.push_back(x[i]);
        }
    }
    return peaks;
}

namespace {

std::array<double, 5> top_five(std::vector<double> gaps) {
    std::sort(gaps.begin(), gaps.end(), std::greater<>());
    std::array<double, 5> top{};
    std::copy_n(gaps.begin(), std::min<std::size_t>(5, gaps.size()), top.begin());
    return top;
}

}  // namespace

std::array<double, 5> peak_distance_features(const PeakSet& peaks, double rate) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < peaks.indices.size(); ++i) {
        gaps.push_back(static_cast<double>(peaks.indices[i] - peaks.indices[i - 1]) / rate);
    }
    return top_five(std::move(gaps));
}

std::array<double, 5> peak_amplitude_gap_features(const PeakSet& peaks) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < peaks.amplitudes.size(); ++i) {
        gaps.push_back(std::abs(peaks.amplitudes[i] - peaks.amplitudes[i - 1]));
    }
    return top_five(std::move(gaps));
}

Stats descriptive_stats(std::span<const double> values) {
    if (values.empty()) throw DomainError("descriptive_stats: empty sequence");
    const auto n = static_cast<double>(values.size());
    Stats s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.var = ss / n;
    s.std = std::sqrt(s.var);
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;

    std::vector<double> sorted(values.begin(), values.end());
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    if (sorted.size() % 2 == 1) {
        s.median = sorted[mid];
    } else {
        const double upper = sorted[mid];
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
        s.median = (lower + upper) / 2.0;
    }
    // var from the two-pass sum can exceed std^2 by an ulp; keep var = std^2 exactly.
    s.var = s.std * s.std;
    return s;
}

MotionFeatures motion_features(const SensorWindow& window, Sensor sensor, double alpha, GapMeasure gaps) {
    const auto& stream = window.motion(sensor);
    if (!stream || stream->empty()) throw SensorUnavailableError(std::string(sensor_name(sensor)));

    const auto filtered = low_pass(magnitude(*stream), alpha);
    const auto peaks = detect_max_peaks(filtered);

    MotionFeatures f;
    f.five_peak_distances = gaps == GapMeasure::Time ? peak_distance_features(peaks, filtered.rate)
                                                     : peak_amplitude_gap_features(peaks);
    if (!peaks.amplitudes.empty()) {
        const auto ps = descriptive_stats(peaks.amplitudes);
        f.peak_mean = ps.mean;
        f.peak_std = ps.std;
        f.peak_var = ps.var;
        f.peak_median = ps.median;
    }
    f.raw = descriptive_stats(filtered.samples);
    return f;
}

}  // namespace adl::dsp
