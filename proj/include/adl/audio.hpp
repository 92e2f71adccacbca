#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adl/dsp.hpp"
#include "adl/ingest.hpp"

namespace adl::audio {

struct MfccConfig {
    double frame_length = 0.025;  // seconds
    double hop = 0.010;           // seconds
    std::size_t n_mel_filters = 26;
    std::size_t n_coefficients = 26;
    double pre_emphasis = 0.97;
    double fmin = 0.0;
    std::optional<double> fmax;  // defaults to sample_rate / 2

    /// Throws ConfigError when the configuration is unusable at `sample_rate`.
    void validate(double sample_rate) const;
};

inline constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Precomputed framing, window, filterbank and DCT for one sample rate.
class MfccExtractor {
public:
    MfccExtractor(double sample_rate, MfccConfig config = {});

    std::size_t frame_samples() const { return frame_samples_; }
    std::size_t hop_samples() const { return hop_samples_; }
    std::size_t fft_size() const { return fft_size_; }
    std::size_t frame_count(std::size_t n_samples) const;
    /// Centre frequency (Hz) of each triangular filter.
    const std::vector<double>& filter_centers() const { return centers_; }
    /// Filter weights at FFT bins 0..fft_size/2, one row per filter.
    const std::vector<std::vector<double>>& filterbank() const { return weights_; }

    /// Floored natural-log filter energies per frame.
    std::vector<std::vector<double>> log_energies(std::span<const double> samples) const;
    std::vector<std::vector<double>> frames(std::span<const double> samples) const;

private:
    std::vector<double> power_spectrum(std::span<const double> frame) const;
    std::vector<double> dct(std::span<const double> log_energy) const;

    double sample_rate_;
    MfccConfig config_;
    std::size_t frame_samples_;
    std::size_t hop_samples_;
    std::size_t fft_size_;
    std::vector<double> window_;
    std::vector<double> centers_;
    std::vector<std::vector<double>> weights_;
    std::vector<std::vector<double>> dct_basis_;
    std::vector<std::complex<double>> twiddles_;
};

/// Pre-emphasis, Hamming frames, power spectrum, mel filterbank, log, DCT-II.
std::vector<std::vector<double>> mfcc_frames(std::span<const double> samples, double sample_rate,
                                             const MfccConfig& config = {});

struct AudioFeatures {
    std::vector<double> mfcc;  // mean over frames, n_coefficients values
    dsp::Stats raw;
};

AudioFeatures audio_features(const SensorWindow& window, const MfccConfig& config = {});

}  // namespace adl::audio
