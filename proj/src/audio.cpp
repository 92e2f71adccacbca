#include "adl/audio.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "adl/error.hpp"

namespace adl::audio {

namespace {

void fft_in_place(std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& twiddles) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * twiddles[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

}  // namespace

void MfccConfig::validate(double sample_rate) const {
    if (!(sample_rate > 0.0)) throw ConfigError("audio sample rate must be positive");
    if (n_mel_filters == 0 || n_coefficients == 0) throw ConfigError("mfcc: filter and coefficient counts must be >= 1");
    if (n_coefficients > n_mel_filters) throw ConfigError("mfcc: n_coefficients exceeds n_mel_filters");
    if (!(frame_length > 0.0)) throw ConfigError("mfcc: frame_length must be positive");
    if (!(hop > 0.0 && hop <= frame_length)) throw ConfigError("mfcc: hop must lie in (0, frame_length]");
    const double top = fmax.value_or(sample_rate / 2.0);
    if (!(fmin >= 0.0 && fmin < top && top <= sample_rate / 2.0)) {
        throw ConfigError("mfcc: need 0 <= fmin < fmax <= sample_rate / 2");
    }
    if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0)) throw ConfigError("mfcc: pre_emphasis must lie in [0, 1)");
    if (std::lround(frame_length * sample_rate) < 2) throw ConfigError("mfcc: frame shorter than two samples");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MfccExtractor::MfccExtractor(double sample_rate, MfccConfig config)
    : sample_rate_(sample_rate), config_(std::move(config)) {
    config_.validate(sample_rate_);
    frame_samples_ = static_cast<std::size_t>(std::lround(config_.frame_length * sample_rate_));
    hop_samples_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(config_.hop * sample_rate_)));
    fft_size_ = std::bit_ceil(frame_samples_);

    using std::numbers::pi;
    window_.resize(frame_samples_);
    for (std::size_t n = 0; n < frame_samples_; ++n) {
        window_[n] = 0.54 - 0.46 * std::cos(2.0 * pi * static_cast<double>(n) / static_cast<double>(frame_samples_ - 1));
    }

    twiddles_.resize(fft_size_ / 2);
    for (std::size_t k = 0; k < twiddles_.size(); ++k) {
        twiddles_[k] = std::polar(1.0, -2.0 * pi * static_cast<double>(k) / static_cast<double>(fft_size_));
    }

    // Triangles are evaluated at each bin's exact frequency, so narrow low filters never vanish.
    const std::size_t n_filters = config_.n_mel_filters;
    const double mel_lo = hz_to_mel(config_.fmin);
    const double mel_hi = hz_to_mel(config_.fmax.value_or(sample_rate_ / 2.0));
    std::vector<double> edges(n_filters + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_filters + 1));
    }
    const std::size_t n_bins = fft_size_ / 2 + 1;
    weights_.assign(n_filters, std::vector<double>(n_bins, 0.0));
    centers_.resize(n_filters);
    for (std::size_t m = 0; m < n_filters; ++m) {
        const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
        centers_[m] = center;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate_ / static_cast<double>(fft_size_);
            double w = 0.0;
            if (f > left && f <= center) {
                w = (f - left) / (center - left);
            } else if (f > center && f < right) {
                w = (right - f) / (right - center);
            }
            weights_[m][k] = w;
        }
    }

    const std::size_t n_coeff = config_.n_coefficients;
    dct_basis_.assign(n_coeff, std::vector<double>(n_filters));
    for (std::size_t k = 0; k < n_coeff; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n_filters));
        for (std::size_t n = 0; n < n_filters; ++n) {
            dct_basis_[k][n] = scale * std::cos(pi * static_cast<double>(k) * (2.0 * static_cast<double>(n) + 1.0) /
                                                (2.0 * static_cast<double>(n_filters)));
        }
    }
}

std::size_t MfccExtractor::frame_count(std::size_t n_samples) const {
    if (n_samples < frame_samples_) return 0;
    return (n_samples - frame_samples_) / hop_samples_ + 1;
}

std::vector<double> MfccExtractor::power_spectrum(std::span<const double> frame) const {
    std::vector<std::complex<double>> buf(fft_size_);
    for (std::size_t n = 0; n < frame.size(); ++n) buf[n] = frame[n] * window_[n];
    fft_in_place(buf, twiddles_);
    std::vector<double> power(fft_size_ / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]) / static_cast<double>(fft_size_);
    return power;
}

std::vector<double> MfccExtractor::dct(std::span<const double> log_energy) const {
    std::vector<double> out(dct_basis_.size(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t n = 0; n < log_energy.size(); ++n) out[k] += dct_basis_[k][n] * log_energy[n];
    }
    return out;
}

std::vector<std::vector<double>> MfccExtractor::log_energies(std::span<const double> samples) const {
    const std::size_t count = frame_count(samples.size());
    if (count == 0) throw DomainError("audio shorter than one frame");

    // Only samples that belong to some frame are pre-emphasised.
    const std::size_t used = (count - 1) * hop_samples_ + frame_samples_;
    std::vector<double> emphasised(used);
    emphasised[0] = samples[0];
    for (std::size_t n = 1; n < used; ++n) emphasised[n] = samples[n] - config_.pre_emphasis * samples[n - 1];

    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t f = 0; f < count; ++f) {
        const auto power = power_spectrum(std::span(emphasised).subspan(f * hop_samples_, frame_samples_));
        std::vector<double> energies(weights_.size());
        for (std::size_t m = 0; m < weights_.size(); ++m) {
            double e = 0.0;
            for (std::size_t k = 0; k < power.size(); ++k) e += weights_[m][k] * power[k];
            energies[m] = std::log(std::max(e, kLogFloor));
        }
        out.push_back(std::move(energies));
    }
    return out;
}

std::vector<std::vector<double>> MfccExtractor::frames(std::span<const double> samples) const {
    auto energies = log_energies(samples);
    std::vector<std::vector<double>> out;
    out.reserve(energies.size());
    for (const auto& e : energies) out.push_back(dct(e));
    return out;
}

std::vector<std::vector<double>> mfcc_frames(std::span<const double> samples, double sample_rate,
                                             const MfccConfig& config) {
    return MfccExtractor(sample_rate, config).frames(samples);
}

AudioFeatures audio_features(const SensorWindow& window, const MfccConfig& config) {
    if (!window.audio || window.audio->samples.empty()) throw SensorUnavailableError("mic");
    const auto& audio = *window.audio;
    const auto frames = mfcc_frames(audio.samples, audio.sample_rate, config);

    AudioFeatures f;
    f.mfcc.assign(config.n_coefficients, 0.0);
    for (const auto& frame : frames) {
        for (std::size_t k = 0; k < frame.size(); ++k) f.mfcc[k] += frame[k];
    }
    for (double& c : f.mfcc) c /= static_cast<double>(frames.size());
    f.raw = dsp::descriptive_stats(audio.samples);
    return f;
}

}  // namespace adl::audio
