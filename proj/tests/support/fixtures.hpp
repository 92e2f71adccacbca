#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "adl/ingest.hpp"
#include "adl/synth.hpp"

namespace fixture {

inline adl::TriaxialStream random_triaxial(std::mt19937_64& rng, std::size_t n, double rate, double scale) {
    std::normal_distribution<double> d(0.0, scale);
    adl::TriaxialStream s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = {static_cast<double>(i) / rate, d(rng), d(rng), d(rng)};
    return s;
}

struct RandomWindowOptions {
    double p_magnet = 0.5;
    double p_gyro = 0.5;
    double p_audio = 0.5;
    double p_gps = 0.5;
    bool accel = true;
};

// Arbitrary but valid window: unstructured noise streams of random length,
// each optional sensor present with the given probability.
inline adl::SensorWindow random_window(std::mt19937_64& rng, const std::string& id, const RandomWindowOptions& o = {}) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> len(50, 500);
    adl::SensorWindow w;
    w.window_id = id;
    const double scale = std::exp(u(rng) * 6.0 - 3.0);
    if (o.accel) w.accel = random_triaxial(rng, len(rng), 100.0, scale);
    if (u(rng) < o.p_magnet) w.magnet = random_triaxial(rng, len(rng), 100.0, 40.0 * u(rng) + 0.01);
    if (u(rng) < o.p_gyro) w.gyro = random_triaxial(rng, len(rng), 100.0, 2.0 * u(rng) + 0.01);
    if (u(rng) < o.p_audio) {
        std::uniform_int_distribution<std::size_t> alen(200, 8000);
        adl::AudioStream a;
        a.samples.resize(alen(rng));
        const double amp = u(rng);
        for (auto& v : a.samples) v = amp * (2.0 * u(rng) - 1.0);
        w.audio = std::move(a);
    }
    if (u(rng) < o.p_gps) {
        std::vector<adl::GpsSample> g(1 + len(rng) % 6);
        double lat = 180.0 * u(rng) - 90.0, lon = 360.0 * u(rng) - 180.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = {static_cast<double>(i), std::clamp(lat, -90.0, 90.0), std::clamp(lon, -180.0, 180.0)};
            lat += 1e-3 * (u(rng) - 0.5);
            lon += 1e-3 * (u(rng) - 0.5);
        }
        w.gps = std::move(g);
    }
    return w;
}

inline adl::synth::SynthSpec spec(adl::Stage stage, std::size_t count, std::uint64_t seed) {
    adl::synth::SynthSpec s;
    s.stage = stage;
    s.classes = adl::synth::all_classes(stage);
    s.count = count;
    s.seed = seed;
    return s;
}

}  // namespace fixture
