// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "adl/ann.hpp"
#include "adl/audio.hpp"
#include "adl/dsp.hpp"
#include "adl/geo.hpp"
#include "adl/harness.hpp"
#include "adl/ingest.hpp"
#include "adl/recognizer.hpp"
#include "adl/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace adl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// The 6000-window standing dataset is shared by the two experiment criteria.
const std::vector<SensorWindow>& standing_dataset() {
    static const auto windows = [] {
        auto spec = fixture::spec(Stage::Standing, 6000, 2024);
        spec.with_audio = false;
        return synth::synthesize_dataset(spec);
    }();
    return windows;
}

Outcome gradient_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> width(1, 8), depth(1, 3), classes(2, 6);
    std::normal_distribution<double> d(0.0, 1.0);
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        ann::Topology t;
        t.layers.push_back(width(rng));
        const auto hidden = depth(rng);
        for (std::size_t h = 0; h < hidden; ++h) t.layers.push_back(width(rng));
        t.layers.push_back(classes(rng));
        const auto net = ann::init_network(t, rng(), c % 3 ? ann::InitScheme::FanIn : ann::InitScheme::FanAvg);
        ann::Sample s;
        for (std::size_t i = 0; i < t.inputs(); ++i) s.features.push_back(d(rng));
        s.label = std::uniform_int_distribution<std::size_t>(0, t.outputs() - 1)(rng);
        worst = std::max(worst, ann::gradient_check(net, s, 1e-5, c % 2 ? 1e-2 : 0.0));
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-6 && secs < 10.0, fmt("max relative error %.3g over 50 cases, %.2f s", worst, secs)};
}

Outcome mfcc_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<std::size_t> len(200, 8000);
    std::uniform_real_distribution<double> u(-1.0, 1.0), f(20.0, 3900.0);
    double worst = 0.0;
    for (int clip = 0; clip < 20; ++clip) {
        std::vector<double> x(len(rng));
        const double hz = f(rng), noise = std::abs(u(rng));
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = 0.5 * std::sin(2 * std::numbers::pi * hz * static_cast<double>(i) / 8000.0) + noise * u(rng);
        }
        const auto got = audio::mfcc_frames(x, 8000.0);
        const auto want = oracle::mfcc(x, {});
        if (got.size() != want.size()) return {false, "frame count differs from the oracle"};
        for (std::size_t fr = 0; fr < got.size(); ++fr) {
            for (std::size_t k = 0; k < got[fr].size(); ++k) worst = std::max(worst, oracle::rel_err(got[fr][k], want[fr][k]));
        }
    }
    const auto silence = audio::mfcc_frames(std::vector<double>(8000, 0.0), 8000.0);
    const double c0 = std::sqrt(26.0) * std::log(1e-10);
    double silence_err = 0.0;
    for (const auto& fr : silence) {
        silence_err = std::max(silence_err, std::abs(fr[0] - c0));
        for (std::size_t k = 1; k < fr.size(); ++k) silence_err = std::max(silence_err, std::abs(fr[k]));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-6 && silence_err <= 1e-9 && secs < 30.0,
            fmt("max relative error %.3g on 20 clips, silence error %.3g, %.2f s", worst, silence_err, secs)};
}

Outcome geodesy() {
    const double id = geo::haversine({48.1, 11.6}, {48.1, 11.6});
    const double deg = geo::haversine({0, 0}, {0, 1});
    const double anti = geo::haversine({0, 0}, {0, 180});
    bool ok = std::abs(id) <= 0.1 && std::abs(deg - 111194.9) <= 0.1 && std::abs(anti - 20015086.8) <= 1.0;
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const geo::GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
        if (geo::haversine(a, b) != geo::haversine(b, a)) ++violations;
        if (geo::haversine(a, c) > geo::haversine(a, b) + geo::haversine(b, c) + 1e-6) ++violations;
    }
    ok = ok && violations == 0;
    return {ok, fmt("identity %.3g m, 1 deg %.4f m, antipodal %.4f m, %zu violations on 1000 triples", id, deg, anti,
                    violations)};
}

Outcome standing_experiment() {
    const auto t0 = Clock::now();
    const auto& windows = standing_dataset();
    harness::ExperimentConfig cfg;
    cfg.stages = {Stage::Standing};
    cfg.combinations = {1, 2, 3};
    cfg.variants = {5};
    cfg.normalization = harness::Normalization::On;
    cfg.base_iterations = 1'000'000;
    cfg.iters_scale = 1e-2;
    cfg.seed = 42;
    const auto report = harness::run_experiment(cfg, windows).report;
    const double secs = seconds_since(t0);
    double lowest = 100.0;
    std::string cells;
    for (const auto& c : report.cells) {
        lowest = std::min(lowest, c.failed ? 0.0 : c.accuracy);
        cells += fmt(" %d/%s=%.2f", c.combination, std::string(ann::kind_name(c.kind)).c_str(), c.accuracy);
    }
    const bool ok = report.cells.size() == 9 && lowest >= 99.0 && report.max_iterations == 10'000 && secs < 180.0;
    return {ok, fmt("lowest accuracy %.2f%% over %zu cells, %.1f s;", lowest, report.cells.size(), secs) + cells};
}

Outcome normalization_effect() {
    const auto& windows = standing_dataset();
    harness::ExperimentConfig cfg;
    cfg.stages = {Stage::Standing};
    cfg.combinations = {2};
    cfg.variants = {5};
    cfg.kinds = {ann::ModelKind::Dnn};
    cfg.normalization = harness::Normalization::Both;
    cfg.feature_scales["accel.raw_mean"] = 1e6;
    cfg.seed = 42;
    const auto report = harness::run_experiment(cfg, windows).report;
    double raw = -1, norm = -1;
    for (const auto& c : report.cells) (c.normalized ? norm : raw) = c.accuracy;
    return {raw >= 0 && raw <= 60.0 && norm > raw,
            fmt("scaled channel accel.raw_mean x1e6: raw DNN %.2f%%, normalized DNN %.2f%%", raw, norm)};
}

Outcome hierarchical_gating() {
    std::vector<SensorWindow> train;
    for (auto stage : {Stage::Adl, Stage::Env, Stage::Standing}) {
        auto spec = fixture::spec(stage, stage == Stage::Env ? 180 : 150, 600 + static_cast<std::uint64_t>(stage));
        spec.audio_seconds = 0.25;
        spec.id_prefix = std::string(stage_key(stage));
        auto part = synth::synthesize_dataset(spec);
        train.insert(train.end(), part.begin(), part.end());
    }
    recognizer::PipelineSpec spec;
    spec.adl = {1, 5, ann::ModelKind::Dnn, true};
    spec.env = {1, 5, ann::ModelKind::Fnn, true};
    spec.standing = {1, 5, ann::ModelKind::Dnn, true};
    spec.train.max_iterations = 3000;
    spec.train.seed = 6;
    const auto model = recognizer::train_pipeline(train, spec);

    std::mt19937_64 rng(606);
    std::bernoulli_distribution coin(0.5);
    std::vector<SensorWindow> probes;
    for (auto stage : {Stage::Adl, Stage::Standing}) {
        auto s = fixture::spec(stage, 125, 700 + static_cast<std::uint64_t>(stage));
        s.audio_seconds = 0.25;
        for (auto w : synth::synthesize_dataset(s)) {
            if (coin(rng)) w.audio.reset();
            if (coin(rng)) w.gps.reset();
            probes.push_back(std::move(w));
        }
    }
    for (int i = 0; i < 250; ++i) probes.push_back(fixture::random_window(rng, "rand" + std::to_string(i)));

    std::size_t violations = 0, with_standing = 0;
    auto sums_to_one = [](const std::vector<double>& s, std::size_t k) {
        return s.size() == k && std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 1.0) <= 1e-9;
    };
    for (const auto& w : probes) {
        const auto r = recognizer::recognize(w, model);
        const bool expect = r.adl.label == AdlLabel::Standing && w.audio && w.gps;
        if (r.standing.has_value() != expect) ++violations;
        if (r.environment.has_value() != w.audio.has_value()) ++violations;
        if (!sums_to_one(r.adl.scores, 5)) ++violations;
        if (r.environment && !sums_to_one(r.environment->scores, 9)) ++violations;
        if (r.standing && !sums_to_one(r.standing->scores, 3)) ++violations;
        with_standing += r.standing.has_value();
    }
    return {violations == 0 && probes.size() == 500,
            fmt("%zu windows, %zu reached the standing stage, %zu violations", probes.size(), with_standing, violations)};
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + ADL_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return status == 0 ? 0 : (WIFEXITED(status) ? WEXITSTATUS(status) : 255);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const fs::path& cli_workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "adl_acceptance_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        std::ofstream(d / "config.yaml") << "version: 1\n"
                                            "seed: 11\n"
                                            "dataset:\n"
                                            "  synth: {stage: adl, count: 400, seed: 5, audio_seconds: 0.5}\n"
                                            "grid:\n"
                                            "  stages: [adl, env, standing]\n"
                                            "  combinations: [3]\n"
                                            "  variants: [5]\n"
                                            "  kinds: [DNN, FNN]\n"
                                            "  normalization: both\n";
        return d;
    }();
    return dir;
}

Outcome determinism_and_persistence() {
    const auto& dir = cli_workdir();
    const auto cfg = (dir / "config.yaml").string();
    const int a = run_cli("synth --config \"" + cfg + "\" --out \"" + (dir / "data").string() + "\"", dir / "synth.log");
    const int b = run_cli("experiment --config \"" + cfg + "\" --data \"" + (dir / "data").string() + "\" --out \"" +
                              (dir / "run1").string() + "\"",
                          dir / "run1.log");
    const int c = run_cli("experiment --config \"" + cfg + "\" --data \"" + (dir / "data").string() + "\" --out \"" +
                              (dir / "run2").string() + "\"",
                          dir / "run2.log");
    if (a || b || c) return {false, fmt("CLI exit codes synth=%d run1=%d run2=%d", a, b, c)};
    const auto r1 = slurp(dir / "run1" / "report.json");
    const auto r2 = slurp(dir / "run2" / "report.json");
    const bool same_report = !r1.empty() && r1 == r2;

    std::mt19937_64 rng(707);
    std::normal_distribution<double> d(0.0, 3.0);
    auto net = ann::init_network(ann::Topology{{12, 24, 12, 12, 5}}, 7);
    std::vector<ann::Sample> data;
    for (int i = 0; i < 200; ++i) {
        ann::Sample s;
        for (int k = 0; k < 12; ++k) s.features.push_back(d(rng));
        s.label = static_cast<std::size_t>(i % 5);
        data.push_back(std::move(s));
    }
    ann::TrainConfig tc;
    tc.max_iterations = 300;
    tc.l2_lambda = 1e-4;
    net = ann::train(net, data, tc).net;
    const auto loaded = ann::load_model(ann::save_model(net));
    std::size_t mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(12);
        for (auto& v : x) v = d(rng);
        if (ann::forward(net, x) != ann::forward(loaded, x)) ++mismatches;
    }
    return {same_report && mismatches == 0,
            fmt("reports %s (%zu bytes), %zu/100 round-trip prediction mismatches",
                same_report ? "byte-identical" : "DIFFER", r1.size(), mismatches)};
}

Outcome peak_features() {
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<std::size_t> len(0, 400);
    std::uniform_int_distribution<int> level(0, 4);
    std::normal_distribution<double> d(0.0, 1.0);
    std::size_t mismatches = 0, shape_errors = 0;
    for (int i = 0; i < 1000; ++i) {
        dsp::ScalarSeries s{std::vector<double>(len(rng)), 100.0};
        for (auto& v : s.samples) v = i % 2 ? d(rng) : level(rng);
        const auto p = dsp::detect_max_peaks(s);
        if (p.indices != oracle::peaks(s.samples)) ++mismatches;
        const auto f = dsp::peak_distance_features(p, s.rate);
        const std::size_t gaps = p.indices.size() > 1 ? p.indices.size() - 1 : 0;
        if (!std::is_sorted(f.begin(), f.end(), std::greater<>())) ++shape_errors;
        for (std::size_t k = gaps; k < f.size(); ++k) shape_errors += f[k] != 0.0;
        for (std::size_t k = 0; k < std::min<std::size_t>(gaps, 5); ++k) shape_errors += !(f[k] > 0.0);
    }
    dsp::ScalarSeries sine{{}, 100.0};
    for (int i = 0; i < 500; ++i) sine.samples.push_back(std::sin(2 * std::numbers::pi * 2.0 * i / 100.0 + 0.3));
    const auto sp = dsp::detect_max_peaks(sine);
    bool spacing = sp.indices.size() == 10;
    for (std::size_t i = 1; spacing && i < sp.indices.size(); ++i) {
        spacing = std::abs(static_cast<double>(sp.indices[i] - sp.indices[i - 1]) / 100.0 - 0.5) <= 0.01 + 1e-12;
    }
    return {mismatches == 0 && shape_errors == 0 && spacing,
            fmt("%zu brute-force mismatches, %zu shape errors, 2 Hz sine: %zu peaks%s", mismatches, shape_errors,
                sp.indices.size(), spacing ? " at 0.5 s spacing" : " (bad spacing)")};
}

Outcome cli_end_to_end() {
    const auto& dir = cli_workdir();
    const auto model = dir / "run1" / "pipeline";
    if (!fs::exists(model / "manifest.json")) {
        if (determinism_and_persistence(); !fs::exists(model / "manifest.json")) return {false, "no trained pipeline"};
    }
    const auto held = dir / "held";
    if (int rc = run_cli("synth --stage adl --count 100 --seed 999 --out \"" + held.string() + "\"", dir / "held.log"))
        return {false, fmt("synth exit %d", rc)};
    std::size_t correct = 0, total = 0, failures = 0;
    for (const auto& w : read_dataset(held)) {
        const auto file = held / (w.window_id + ".csv");
        const auto out = dir / "classify.json";
        if (run_cli("classify --format json --model \"" + model.string() + "\" \"" + file.string() + "\"", out)) {
            ++failures;
            continue;
        }
        const auto doc = nlohmann::json::parse(slurp(out), nullptr, false);
        ++total;
        if (!doc.is_discarded() && doc.contains("adl") && doc["adl"].value("label", "") == *w.label(Stage::Adl)) ++correct;
    }
    const bool ok = failures == 0 && total == 100 && correct >= 95;
    return {ok, fmt("%zu/%zu held-out windows correct, %zu non-zero exits", correct, total, failures)};
}

Outcome statistics_oracle() {
    std::mt19937_64 rng(1010);
    std::uniform_int_distribution<std::size_t> len(1, 1000);
    std::uniform_real_distribution<double> offset(-1e3, 1e3), spread(1e-3, 1e3);
    double worst = 0.0;
    std::size_t even = 0, odd = 0, exact_misses = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(len(rng));
        std::normal_distribution<double> d(offset(rng), spread(rng));
        for (auto& v : x) v = d(rng);
        (x.size() % 2 ? odd : even)++;
        const auto s = dsp::descriptive_stats(x);
        const auto o = oracle::moments(x);
        double scale = 0.0;
        for (double v : x) scale = std::max(scale, std::abs(v));
        // The mean can be arbitrarily close to zero, so it is measured against the data's magnitude.
        worst = std::max({worst, std::abs(s.mean - o.mean) / std::max(std::abs(o.mean), scale),
                          std::abs(s.var - o.var) / o.var, std::abs(s.std - o.std) / o.std,
                          std::abs(s.median - o.median) / std::max(std::abs(o.median), 1e-300)});
        exact_misses += (s.min != o.min) + (s.max != o.max);
    }
    return {worst <= 1e-12 && exact_misses == 0,
            fmt("max relative error %.3g over 1000 sequences (%zu even, %zu odd lengths), %zu min/max misses", worst, even,
                odd, exact_misses)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gradient correctness", gradient_correctness},
        {"MFCC oracle equivalence", mfcc_oracle},
        {"geodesy", geodesy},
        {"synthetic standing experiment", standing_experiment},
        {"normalization effect", normalization_effect},
        {"hierarchical gating", hierarchical_gating},
        {"determinism and persistence", determinism_and_persistence},
        {"peak features", peak_features},
        {"end-to-end CLI", cli_end_to_end},
        {"statistics oracle", statistics_oracle},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
