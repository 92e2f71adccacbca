#include "adl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "adl/error.hpp"
#include "adl/json_io.hpp"

namespace adl::harness {

namespace {

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void text(std::string_view s) {
        bytes(s.data(), s.size());
        bytes("\0", 1);
    }
    template <typename T>
    void value(const T& v) {
        bytes(&v, sizeof v);
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string config_digest(const ExperimentConfig& c) {
    json_io::Json j;
    j["split"] = c.split_ratio;
    j["seed"] = c.seed;
    std::vector<std::string> stages, kinds;
    for (auto s : c.stages) stages.emplace_back(stage_key(s));
    for (auto k : c.kinds) kinds.emplace_back(ann::kind_name(k));
    j["stages"] = stages;
    j["combinations"] = c.combinations;
    j["variants"] = c.variants;
    j["kinds"] = kinds;
    j["normalization"] = static_cast<int>(c.normalization);
    j["max_iterations"] = c.max_iterations();
    j["train"] = c.train.digest();
    if (c.l2_override) j["l2"] = *c.l2_override;
    j["fusion"] = json_io::to_json(c.fusion);
    j["scales"] = c.feature_scales;
    Fnv1a h;
    h.text(j.dump());
    return h.hex();
}

/// Feature vectors of one (stage, combination, variant), shared by every kind/normalization cell.
struct Group {
    Stage stage;
    int combination;
    int variant;
    std::vector<fusion::FeatureVector> train, test;
    std::vector<std::size_t> train_labels, test_labels;
    std::string error;
};

struct CellPlan {
    std::size_t group;
    ann::ModelKind kind;
    bool normalized;
};

std::vector<bool> normalization_axis(Normalization n) {
    switch (n) {
        case Normalization::On: return {true};
        case Normalization::Off: return {false};
        case Normalization::Both: return {false, true};
    }
    return {};
}

fusion::FeatureVector scaled(fusion::FeatureVector v, const std::map<std::string, double>& scales) {
    if (scales.empty()) return v;
    for (std::size_t i = 0; i < v.names.size(); ++i) {
        if (auto it = scales.find(v.names[i]); it != scales.end()) v.values[i] *= it->second;
    }
    return v;
}

std::string fmt_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

std::size_t ExperimentConfig::max_iterations() const {
    return static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(base_iterations) * iters_scale)));
}

void ExperimentConfig::validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
    if (stages.empty() || combinations.empty() || variants.empty() || kinds.empty()) {
        throw ConfigError("experiment grid axes must be non-empty");
    }
    if (!(iters_scale > 0.0)) throw ConfigError("iters_scale must be positive");
    if (workers == 0) throw ConfigError("workers must be >= 1");
    fusion.validate();
    for (int c : combinations) fusion.combination(c);
    for (int v : variants) fusion.variant(v);
    train.validate();
}

Split split_indices(std::span<const std::size_t> labels, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    Split split;
    std::mt19937_64 rng(synth::derive_seed(seed, 0x5917));
    for (auto& [label, members] : by_class) {
        if (members.size() < 2) {
            throw ConfigError("class " + std::to_string(label) + " has fewer than two windows; cannot split");
        }
        std::shuffle(members.begin(), members.end(), rng);
        const auto n = members.size();
        const auto n_train = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))), 1, n - 1);
        split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::pair<std::vector<SensorWindow>, std::vector<SensorWindow>> split_dataset(std::span<const SensorWindow> windows,
                                                                              Stage stage, double ratio,
                                                                              std::uint64_t seed) {
    std::vector<std::size_t> members, labels;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        auto label = windows[i].label(stage);
        if (!label) continue;
        auto index = class_index(stage, *label);
        if (!index) throw ValidationError("unknown " + std::string(stage_key(stage)) + " label '" + *label + "'");
        members.push_back(i);
        labels.push_back(*index);
    }
    const auto split = split_indices(labels, ratio, seed);
    std::pair<std::vector<SensorWindow>, std::vector<SensorWindow>> out;
    for (auto i : split.train) out.first.push_back(windows[members[i]]);
    for (auto i : split.test) out.second.push_back(windows[members[i]]);
    return out;
}

Evaluation evaluate(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t classes) {
    if (truth.size() != predicted.size()) throw DomainError("evaluate: truth and prediction lengths differ");
    Evaluation e{0.0, Confusion(classes, std::vector<std::size_t>(classes, 0))};
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes || predicted[i] >= classes) throw DomainError("evaluate: label out of range");
        ++e.confusion[truth[i]][predicted[i]];
        if (truth[i] == predicted[i]) ++correct;
    }
    e.accuracy = truth.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
    return e;
}

Evaluation evaluate(const ann::NeuralNet& net, std::span<const ann::Sample> test) {
    std::vector<std::size_t> truth, predicted;
    for (const auto& s : test) {
        truth.push_back(s.label);
        predicted.push_back(ann::predict(net, s.features).label);
    }
    return evaluate(truth, predicted, net.topology.outputs());
}

Evaluation evaluate(const recognizer::PipelineModel& pipeline, std::span<const SensorWindow> test, Stage stage) {
    std::vector<std::size_t> truth, predicted;
    for (const auto& w : test) {
        auto label = w.label(stage);
        if (!label) continue;
        auto index = class_index(stage, *label);
        if (!index) throw ValidationError("unknown label '" + *label + "'");
        std::optional<std::string> env = w.label(Stage::Env);
        std::optional<std::string_view> env_view;
        if (stage == Stage::Standing && env) env_view = *env;
        truth.push_back(*index);
        predicted.push_back(recognizer::run_stage(w, pipeline.stage(stage), pipeline.fusion, env_view).label);
    }
    return evaluate(truth, predicted, class_count(stage));
}

std::vector<SensorWindow> load_windows(const ExperimentConfig& config) {
    if (config.dataset_dir) return read_dataset(*config.dataset_dir);
    return synth::synthesize_dataset(config.synth);
}

std::string dataset_digest(std::span<const SensorWindow> windows) {
    Fnv1a h;
    for (const auto& w : windows) {
        h.text(w.window_id);
        h.value(w.duration);
        for (const auto& [k, v] : w.labels) {
            h.text(k);
            h.text(v);
        }
        for (Sensor s : {Sensor::Accel, Sensor::Magnet, Sensor::Gyro}) {
            const auto& stream = w.motion(s);
            h.value(stream ? stream->size() : std::size_t{0});
            if (stream) h.bytes(stream->data(), stream->size() * sizeof(Vec3Sample));
        }
        h.value(w.audio ? w.audio->samples.size() : std::size_t{0});
        if (w.audio) {
            h.value(w.audio->sample_rate);
            h.bytes(w.audio->samples.data(), w.audio->samples.size() * sizeof(double));
        }
        h.value(w.gps ? w.gps->size() : std::size_t{0});
        if (w.gps) h.bytes(w.gps->data(), w.gps->size() * sizeof(GpsSample));
    }
    return h.hex();
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    const auto windows = load_windows(config);
    return run_experiment(config, windows);
}

ExperimentOutput run_experiment(const ExperimentConfig& config, std::span<const SensorWindow> windows) {
    config.validate();
    ExperimentOutput out;
    auto& report = out.report;
    report.seed = config.seed;
    report.dataset_digest = dataset_digest(windows);
    report.config_digest = config_digest(config);
    report.max_iterations = config.max_iterations();

    std::vector<Group> groups;
    for (Stage stage : config.stages) {
        std::vector<std::size_t> members, labels;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            auto label = windows[i].label(stage);
            if (!label) continue;
            auto index = class_index(stage, *label);
            if (!index) throw ValidationError("window '" + windows[i].window_id + "': unknown label '" + *label + "'");
            members.push_back(i);
            labels.push_back(*index);
        }
        if (members.empty()) throw ConfigError("no window carries a " + std::string(stage_key(stage)) + " label");
        const auto split = split_indices(labels, config.split_ratio, config.seed);

        for (int combo : config.combinations) {
            for (int variant : config.variants) {
                Group g{stage, combo, variant, {}, {}, {}, {}, {}};
                const auto& c = config.fusion.combination(combo);
                const auto& v = config.fusion.variant(variant);
                auto build = [&](std::size_t member) {
                    const auto& w = windows[members[member]];
                    std::optional<std::string> env = w.label(Stage::Env);
                    std::optional<std::string_view> env_view;
                    if (stage == Stage::Standing && env) env_view = *env;
                    return scaled(fusion::build_feature_vector(w, stage, c, v, env_view, config.fusion), config.feature_scales);
                };
                try {
                    for (auto i : split.train) {
                        g.train.push_back(build(i));
                        g.train_labels.push_back(labels[i]);
                    }
                    for (auto i : split.test) {
                        g.test.push_back(build(i));
                        g.test_labels.push_back(labels[i]);
                    }
                } catch (const Error& e) {
                    g.error = e.what();
                }
                groups.push_back(std::move(g));
            }
        }
    }

    std::vector<CellPlan> plan;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (auto normalized : normalization_axis(config.normalization)) {
            for (auto kind : config.kinds) plan.push_back({gi, kind, normalized});
        }
    }

    report.cells.resize(plan.size());
    std::vector<std::optional<recognizer::StageModel>> models(plan.size());
    auto run_cell = [&](std::size_t ci) {
        const auto& p = plan[ci];
        const auto& g = groups[p.group];
        auto& cell = report.cells[ci];
        cell.stage = g.stage;
        cell.combination = g.combination;
        cell.variant = g.variant;
        cell.kind = p.kind;
        cell.normalized = p.normalized;
        cell.confusion.assign(class_count(g.stage), std::vector<std::size_t>(class_count(g.stage), 0));
        if (!g.error.empty()) {
            cell.failed = true;
            cell.diagnostic = g.error;
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            ann::TrainConfig train = config.train;
            train.max_iterations = config.max_iterations();
            train.seed = synth::derive_seed(config.seed, ci);
            recognizer::StageData data{g.train, g.train_labels, {}};
            ann::TrainResult details;
            auto model = recognizer::train_stage(data, g.stage, {g.combination, g.variant, p.kind, p.normalized}, train,
                                                 config.l2_override, &details);
            std::vector<std::size_t> predicted;
            predicted.reserve(g.test.size());
            for (const auto& v : g.test) {
                const auto& input = model.normalizer ? fusion::normalize(v, *model.normalizer) : v;
                predicted.push_back(ann::predict(model.net, input.values).label);
            }
            auto eval = evaluate(g.test_labels, predicted, class_count(g.stage));
            cell.accuracy = eval.accuracy;
            cell.confusion = std::move(eval.confusion);
            cell.iterations = details.iterations;
            cell.final_loss = details.final_loss;
            models[ci] = std::move(model);
        } catch (const DivergenceError& e) {
            cell.failed = true;
            cell.diagnostic = e.what();
            cell.iterations = e.iteration();
        } catch (const Error& e) {
            cell.failed = true;
            cell.diagnostic = e.what();
        }
        cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const std::size_t workers = std::min(config.workers, std::max<std::size_t>(1, plan.size()));
    if (workers <= 1) {
        for (std::size_t ci = 0; ci < plan.size(); ++ci) run_cell(ci);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t ci = next++; ci < plan.size(); ci = next++) run_cell(ci);
            });
        }
        for (auto& t : pool) t.join();
    }

    double sum = 0.0;
    for (Stage stage : config.stages) {
        std::optional<StageBest> best;
        for (std::size_t ci = 0; ci < report.cells.size(); ++ci) {
            const auto& cell = report.cells[ci];
            if (cell.stage != stage || cell.failed) continue;
            if (!best || cell.accuracy > best->accuracy) best = StageBest{stage, ci, cell.accuracy};
        }
        if (!best) continue;
        report.best.push_back(*best);
        sum += best->accuracy;
    }
    report.average_accuracy = report.best.empty() ? 0.0 : sum / static_cast<double>(report.best.size());

    if (report.best.size() == 3) {
        recognizer::PipelineModel pipeline;
        pipeline.fusion = config.fusion;
        for (const auto& b : report.best) {
            auto& slot = b.stage == Stage::Adl ? pipeline.adl : b.stage == Stage::Env ? pipeline.env : pipeline.standing;
            slot = *models[b.cell];
        }
        out.pipeline = std::move(pipeline);
    }
    return out;
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json_io::Json j;
        j["schema_version"] = kReportSchemaVersion;
        j["seed"] = report.seed;
        j["dataset_digest"] = report.dataset_digest;
        j["config_digest"] = report.config_digest;
        j["max_iterations"] = report.max_iterations;
        auto cells = json_io::Json::array();
        for (const auto& c : report.cells) {
            json_io::Json jc;
            jc["stage"] = std::string(stage_key(c.stage));
            jc["combination"] = c.combination;
            jc["variant"] = c.variant;
            jc["kind"] = std::string(ann::kind_name(c.kind));
            jc["normalized"] = c.normalized;
            jc["status"] = c.failed ? "failed" : "ok";
            jc["diagnostic"] = c.diagnostic;
            jc["accuracy"] = c.accuracy;
            jc["confusion"] = c.confusion;
            jc["iterations"] = c.iterations;
            jc["final_loss"] = c.final_loss;
            cells.push_back(std::move(jc));
        }
        j["cells"] = std::move(cells);
        auto best = json_io::Json::array();
        for (const auto& b : report.best) {
            best.push_back({{"stage", std::string(stage_key(b.stage))}, {"cell", b.cell}, {"accuracy", b.accuracy}});
        }
        j["stage_best"] = std::move(best);
        j["average_accuracy"] = report.average_accuracy;
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    const bool timed = std::any_of(report.cells.begin(), report.cells.end(), [](const auto& c) { return c.wall_seconds > 0.0; });
    out << "Experiment grid (max iterations " << report.max_iterations << ", seed " << report.seed << ")\n";
    out << pad("Stage", 10) << pad("Data", 16) << pad("Framework", 11) << pad("Dataset (Combination)", 23)
        << pad("Iterations", 12) << pad("Accuracy", 10) << pad("Final loss", 13) << (timed ? "Time (s)" : "") << '\n';
    for (const auto& c : report.cells) {
        char loss[32], time[32];
        std::snprintf(loss, sizeof loss, "%.6f", c.final_loss);
        std::snprintf(time, sizeof time, "%.2f", c.wall_seconds);
        out << pad(std::string(stage_key(c.stage)), 10) << pad(c.normalized ? "normalized" : "raw", 16)
            << pad(std::string(ann::kind_name(c.kind)), 11)
            << pad(std::to_string(c.variant) + " (" + std::to_string(c.combination) + ")", 23)
            << pad(std::to_string(c.iterations), 12) << pad(c.failed ? "FAILED" : fmt_pct(c.accuracy), 10)
            << pad(c.failed ? "-" : loss, 13) << (timed ? time : "") << '\n';
        if (c.failed) out << "    " << c.diagnostic << '\n';
    }
    out << "\nStage summary\n";
    out << pad("Stage", 10) << pad("Best accuracy", 15) << pad("Framework", 11) << pad("Data", 16)
        << "Dataset (Combination)\n";
    for (const auto& b : report.best) {
        const auto& c = report.cells[b.cell];
        out << pad(std::string(stage_key(b.stage)), 10) << pad(fmt_pct(b.accuracy), 15)
            << pad(std::string(ann::kind_name(c.kind)), 11) << pad(c.normalized ? "normalized" : "raw", 16)
            << std::to_string(c.variant) + " (" + std::to_string(c.combination) + ")" << '\n';
    }
    out << "Average accuracy: " << fmt_pct(report.average_accuracy) << '\n';
    return out.str();
}

ExperimentReport parse_report(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("report is not readable: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kReportSchemaVersion) throw LoadError("unsupported report schema version");
        ExperimentReport r;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.dataset_digest = j.at("dataset_digest").get<std::string>();
        r.config_digest = j.at("config_digest").get<std::string>();
        r.max_iterations = j.at("max_iterations").get<std::size_t>();
        auto stage_of = [](const nlohmann::json& v) {
            auto s = parse_stage(v.get<std::string>());
            if (!s) throw LoadError("unknown stage in report");
            return *s;
        };
        for (const auto& jc : j.at("cells")) {
            CellResult c;
            c.stage = stage_of(jc.at("stage"));
            c.combination = jc.at("combination").get<int>();
            c.variant = jc.at("variant").get<int>();
            auto kind = ann::parse_kind(jc.at("kind").get<std::string>());
            if (!kind) throw LoadError("unknown model kind in report");
            c.kind = *kind;
            c.normalized = jc.at("normalized").get<bool>();
            c.failed = jc.at("status").get<std::string>() == "failed";
            c.diagnostic = jc.at("diagnostic").get<std::string>();
            c.accuracy = jc.at("accuracy").get<double>();
            c.confusion = jc.at("confusion").get<Confusion>();
            c.iterations = jc.at("iterations").get<std::size_t>();
            c.final_loss = jc.at("final_loss").get<double>();
            r.cells.push_back(std::move(c));
        }
        for (const auto& jb : j.at("stage_best")) {
            StageBest b{stage_of(jb.at("stage")), jb.at("cell").get<std::size_t>(), jb.at("accuracy").get<double>()};
            if (b.cell >= r.cells.size()) throw LoadError("stage_best refers to a missing cell");
            r.best.push_back(b);
        }
        r.average_accuracy = j.at("average_accuracy").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("report is malformed: ") + e.what());
    }
}

}  // namespace adl::harness
