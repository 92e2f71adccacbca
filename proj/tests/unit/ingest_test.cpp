#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>

#include "adl/error.hpp"
#include "adl/geo.hpp"
#include "adl/ingest.hpp"
#include "adl/synth.hpp"
#include "fixtures.hpp"

using namespace adl;

TEST_CASE("accelerometer-only window parses") {
    const auto w = parse_window("# window_id=a1,duration=5\naccel,0,0,0,9.8\naccel,0.01,0.1,0,9.7\n");
    CHECK(w.window_id == "a1");
    REQUIRE(w.accel);
    CHECK(w.accel->size() == 2);
    CHECK(w.accel->at(1).x == doctest::Approx(0.1));
    CHECK_FALSE(w.magnet);
    CHECK_FALSE(w.gyro);
    CHECK_FALSE(w.audio);
    CHECK_FALSE(w.gps);
    const auto avail = SensorAvailability::of(w);
    CHECK(avail.accel);
    CHECK_FALSE(avail.mic);
}

TEST_CASE("latitude out of range is a validation error") {
    CHECK_THROWS_AS(parse_window("# window_id=g\ngps,0,91,10\n"), ValidationError);
    CHECK_THROWS_AS(parse_window("# window_id=g\ngps,0,10,-181\n"), ValidationError);
    CHECK_NOTHROW(parse_window("# window_id=g\ngps,0,90,180\n"));
}

TEST_CASE("malformed rows report their line") {
    try {
        parse_window("# window_id=x\naccel,0,1,2,3\naccel,0.01,1,abc,3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_window("# window_id=x\naccel,0,1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_window("# window_id=x\nbarometer,0,1\n"), ParseError);
    CHECK_THROWS_AS(parse_window("# window_id=x,colour=red\naccel,0,1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_window("# window_id=x\naccel,0,nan,2,3\n"), ParseError);
}

TEST_CASE("timestamps must increase") {
    CHECK_THROWS_AS(parse_window("# window_id=x\naccel,0.02,0,0,1\naccel,0.01,0,0,1\n"), ValidationError);
    CHECK_THROWS_AS(parse_window("# window_id=x\naccel,0.01,0,0,1\naccel,0.01,0,0,1\n"), ValidationError);
}

TEST_CASE("window with no streams is rejected") {
    CHECK_THROWS_AS(parse_window("# window_id=x\n"), ValidationError);
}

TEST_CASE("serialize then parse is the identity on random windows") {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 40; ++i) {
        auto w = fixture::random_window(rng, "r" + std::to_string(i));
        if (i % 3 == 0) w.labels["adl"] = "running";
        const auto back = parse_window(serialize_window(w));
        CHECK(back == w);
    }
}

TEST_CASE("dataset directory round trip keeps labels") {
    auto spec = fixture::spec(Stage::Standing, 9, 3);
    spec.audio_seconds = 0.1;
    const auto windows = synth::synthesize_dataset(spec);
    const auto dir = std::filesystem::temp_directory_path() / "adl_ingest_roundtrip";
    std::filesystem::remove_all(dir);
    write_dataset(dir, windows);
    const auto back = read_dataset(dir);
    CHECK(back == windows);
    std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting is shortest round-trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6371000.0}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_FALSE(parse_double("inf"));
    CHECK_FALSE(parse_double("1.0x"));
}

TEST_CASE("synthetic standing dataset is balanced") {
    auto spec = fixture::spec(Stage::Standing, 6000, 1);
    spec.with_audio = false;
    spec.with_magnet = false;
    spec.with_gyro = false;
    const auto windows = synth::synthesize_dataset(spec);
    REQUIRE(windows.size() == 6000);
    std::map<std::string, int> counts;
    for (const auto& w : windows) ++counts[*w.label(Stage::Standing)];
    CHECK(counts.size() == 3);
    for (const auto& [k, n] : counts) CHECK(n == 2000);
}

TEST_CASE("synthetic balance holds within one for uneven counts") {
    for (std::size_t count : {9u, 10u, 17u, 31u}) {
        auto spec = fixture::spec(Stage::Env, count, 2);
        spec.audio_seconds = 0.05;
        const auto windows = synth::synthesize_dataset(spec);
        std::map<std::string, int> counts;
        for (const auto& w : windows) ++counts[*w.label(Stage::Env)];
        int lo = 1 << 30, hi = 0;
        for (std::size_t c = 0; c < class_count(Stage::Env); ++c) {
            const int n = counts[std::string(class_name(Stage::Env, c))];
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
        CHECK(hi - lo <= 1);
    }
}

TEST_CASE("synthesis is deterministic per seed") {
    auto spec = fixture::spec(Stage::Adl, 10, 77);
    spec.audio_seconds = 0.1;
    const auto a = synth::synthesize_dataset(spec);
    const auto b = synth::synthesize_dataset(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(serialize_window(a[i]) == serialize_window(b[i]));
    spec.seed = 78;
    const auto c = synth::synthesize_dataset(spec);
    CHECK(serialize_window(a[0]) != serialize_window(c[0]));
}

TEST_CASE("every synthetic window re-parses") {
    auto spec = fixture::spec(Stage::Standing, 12, 9);
    spec.audio_seconds = 0.05;
    for (const auto& w : synth::synthesize_dataset(spec)) {
        CHECK_NOTHROW(validate_window(w));
        CHECK(parse_window(serialize_window(w)) == w);
    }
}

TEST_CASE("driving covers far more ground than sleeping") {
    auto spec = fixture::spec(Stage::Standing, 30, 4);
    spec.with_audio = false;
    double driving = 1e300, sleeping = 0;
    for (const auto& w : synth::synthesize_dataset(spec)) {
        const double d = geo::distance_traveled(*w.gps);
        if (w.label(Stage::Standing) == "driving") driving = std::min(driving, d);
        if (w.label(Stage::Standing) == "sleeping") sleeping = std::max(sleeping, d);
    }
    CHECK(driving > sleeping + 20.0);
}

TEST_CASE("empty class list is a configuration error") {
    synth::SynthSpec spec;
    spec.classes.clear();
    CHECK_THROWS_AS(synth::synthesize_dataset(spec), ConfigError);
    spec.classes = {"flying"};
    CHECK_THROWS_AS(synth::synthesize_dataset(spec), ConfigError);
    spec = fixture::spec(Stage::Env, 8, 1);
    CHECK_THROWS_AS(synth::synthesize_dataset(spec), ConfigError);
}
