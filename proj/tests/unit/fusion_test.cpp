#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "adl/error.hpp"
#include "adl/fusion.hpp"
#include "adl/synth.hpp"
#include "fixtures.hpp"

using namespace adl;
using namespace adl::fusion;

namespace {

const FusionConfig kConfig = FusionConfig::defaults();

SensorWindow standing_window() {
    auto spec = fixture::spec(Stage::Standing, 3, 5);
    spec.audio_seconds = 0.1;
    return synth::synthesize_dataset(spec).front();
}

FeatureVector fv(std::vector<double> values) {
    FeatureVector v;
    for (std::size_t i = 0; i < values.size(); ++i) v.names.push_back("f" + std::to_string(i));
    v.values = std::move(values);
    return v;
}

}  // namespace

TEST_CASE("standing vector for combination 1, variant 5 is 25 wide") {
    const auto w = standing_window();
    const auto v = build_feature_vector(w, Stage::Standing, kConfig.combination(1), kConfig.variant(5), "bedroom", kConfig);
    // one-hot environment, accelerometer peak and raw features, distance
    CHECK(v.size() == 9 + 15 + 1);
    CHECK(v.names == feature_names(Stage::Standing, kConfig.combination(1), kConfig.variant(5), kConfig));
    CHECK(v.names.front() == "env.bar");
    CHECK(v.names.back() == "gps.distance");
    std::size_t hot = 0;
    for (std::size_t i = 0; i < 9; ++i) hot += v.values[i] == 1.0;
    CHECK(hot == 1);
    CHECK(v.values[8] == 1.0);
}

TEST_CASE("ADL vectors use motion features only") {
    SensorWindow w = standing_window();
    w.magnet.reset();
    w.gyro.reset();
    w.audio.reset();
    w.gps.reset();
    const auto v = build_feature_vector(w, Stage::Adl, kConfig.combination(1), kConfig.variant(5), std::nullopt, kConfig);
    CHECK(v.size() == 15);
    for (const auto& n : v.names) CHECK(n.rfind("accel.", 0) == 0);
}

TEST_CASE("feature vectors are deterministic") {
    const auto w = standing_window();
    for (int c = 1; c <= 3; ++c) {
        for (int var = 1; var <= 5; ++var) {
            const auto a = build_feature_vector(w, Stage::Standing, kConfig.combination(c), kConfig.variant(var), "street", kConfig);
            const auto b = build_feature_vector(w, Stage::Standing, kConfig.combination(c), kConfig.variant(var), "street", kConfig);
            CHECK(a == b);
        }
    }
}

TEST_CASE("missing sensors and environment labels") {
    auto w = standing_window();
    CHECK_THROWS_AS(build_feature_vector(w, Stage::Standing, kConfig.combination(1), kConfig.variant(5), std::nullopt, kConfig),
                    DomainError);
    CHECK_THROWS_AS(build_feature_vector(w, Stage::Standing, kConfig.combination(1), kConfig.variant(5), "moon", kConfig),
                    DomainError);
    w.gyro.reset();
    try {
        build_feature_vector(w, Stage::Adl, kConfig.combination(3), kConfig.variant(5), std::nullopt, kConfig);
        FAIL("expected an error");
    } catch (const SensorUnavailableError& e) {
        CHECK(e.sensor() == "gyro");
    }
}

TEST_CASE("normalizer fit on known columns") {
    const std::vector<FeatureVector> single{fv({1, -2, 3})};
    const auto n1 = fit_normalizer(single);
    CHECK(n1.mins == n1.maxs);

    const std::vector<FeatureVector> col{fv({0}), fv({5}), fv({10})};
    const auto n = fit_normalizer(col);
    CHECK(n.mins == std::vector<double>{0});
    CHECK(n.maxs == std::vector<double>{10});
    CHECK(normalize(fv({5}), n).values == std::vector<double>{0.5});
    CHECK(normalize(fv({12}), n).values == std::vector<double>{1.2});

    const std::vector<FeatureVector> flat{fv({4, 1}), fv({4, 2})};
    CHECK(normalize(fv({4, 1.5}), fit_normalizer(flat)).values == std::vector<double>{0.0, 0.5});
}

TEST_CASE("normalizer matches a column scan and maps the fit set into the unit box") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> d(0, 100);
    std::vector<FeatureVector> vs;
    for (int i = 0; i < 60; ++i) vs.push_back(fv({d(rng), d(rng), d(rng), 7.0}));
    const auto n = fit_normalizer(vs);
    for (std::size_t j = 0; j < 4; ++j) {
        double lo = vs[0].values[j], hi = lo;
        for (const auto& v : vs) {
            lo = std::min(lo, v.values[j]);
            hi = std::max(hi, v.values[j]);
        }
        CHECK(n.mins[j] == lo);
        CHECK(n.maxs[j] == hi);
    }
    std::vector<FeatureVector> normed;
    for (const auto& v : vs) {
        normed.push_back(normalize(v, n));
        for (double x : normed.back().values) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
    }
    const auto again = fit_normalizer(normed);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(again.mins[j] == doctest::Approx(0.0));
        CHECK(again.maxs[j] == doctest::Approx(1.0));
    }
}

TEST_CASE("normalization preserves per-feature order and undoes affine rescaling") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<FeatureVector> vs, scaled;
    const double a = 1234.5, b = -77.0;
    for (int i = 0; i < 40; ++i) {
        vs.push_back(fv({u(rng), u(rng)}));
        scaled.push_back(fv({a * vs.back().values[0] + b, vs.back().values[1]}));
    }
    const auto n = fit_normalizer(vs);
    const auto m = fit_normalizer(scaled);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const auto x = normalize(vs[i], n), y = normalize(scaled[i], m);
        CHECK(x.values[0] == doctest::Approx(y.values[0]).epsilon(1e-9));
        for (std::size_t k = 0; k < vs.size(); ++k) {
            if (vs[i].values[0] < vs[k].values[0]) CHECK(x.values[0] <= normalize(vs[k], n).values[0]);
        }
    }
}

TEST_CASE("normalizer rejects mismatched names") {
    const std::vector<FeatureVector> a{fv({1, 2})};
    auto other = fv({1, 2});
    other.names[1] = "g";
    CHECK_THROWS_AS(normalize(other, fit_normalizer(a)), DomainError);
    CHECK_THROWS_AS(fit_normalizer(std::vector<FeatureVector>{}), DomainError);
}

TEST_CASE("run enumeration by available sensors") {
    CHECK(enumerate_runs(SensorAvailability::all(), kConfig).size() == 15);

    SensorAvailability partial;
    partial.accel = partial.gps = partial.mic = true;
    const auto runs = enumerate_runs(partial, kConfig);
    CHECK(runs.size() == 5);
    for (const auto& [c, v] : runs) CHECK(c.id == 1);

    SensorAvailability none = SensorAvailability::all();
    none.accel = false;
    CHECK_THROWS_AS(enumerate_runs(none, kConfig), UnsupportedDeviceError);
}

TEST_CASE("unknown combination or variant is a configuration error") {
    CHECK_THROWS_AS(kConfig.combination(9), ConfigError);
    CHECK_THROWS_AS(kConfig.variant(0), ConfigError);
    auto bad = kConfig;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
