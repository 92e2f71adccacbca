#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adl/config.hpp"
#include "adl/error.hpp"
#include "adl/harness.hpp"
#include "adl/ingest.hpp"
#include "adl/recognizer.hpp"
#include "adl/synth.hpp"

namespace fs = std::filesystem;
using namespace adl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> iters_scale;
    std::string out;
    std::string format = "text";
    std::string data;
};

config::AppConfig load(const Common& c) {
    auto app = c.config_path.empty() ? config::parse_config("version: 1\n") : config::load_config(c.config_path);
    if (c.seed) app.experiment.seed = *c.seed;
    if (c.iters_scale) app.experiment.iters_scale = *c.iters_scale;
    if (!c.data.empty()) app.experiment.dataset_dir = c.data;
    app.experiment.validate();
    app.pipeline.train.max_iterations = app.experiment.max_iterations();
    app.pipeline.train.seed = app.experiment.seed;
    return app;
}

harness::ReportFormat format_of(const std::string& f) {
    return f == "json" ? harness::ReportFormat::Json : harness::ReportFormat::Text;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

int cmd_synth(const Common& c, std::optional<std::size_t> count, const std::string& stage) {
    auto app = load(c);
    auto spec = app.experiment.synth;
    if (c.seed) spec.seed = *c.seed;
    if (count) spec.count = *count;
    if (!stage.empty()) {
        auto s = parse_stage(stage);
        if (!s) throw ConfigError("unknown stage '" + stage + "'");
        spec.stage = *s;
        spec.classes = synth::all_classes(*s);
    }
    const auto windows = synth::synthesize_dataset(spec);
    write_dataset(c.out, windows);
    std::cout << "wrote " << windows.size() << " windows to " << c.out << '\n';
    return kExitOk;
}

int cmd_train(const Common& c) {
    auto app = load(c);
    const auto windows = harness::load_windows(app.experiment);
    const auto model = recognizer::train_pipeline(windows, app.pipeline, app.experiment.fusion);
    recognizer::save_bundle(c.out, model);
    std::cout << "trained pipeline on " << windows.size() << " windows; bundle written to " << c.out << '\n';
    return kExitOk;
}

int cmd_experiment(const Common& c) {
    auto app = load(c);
    const auto output = harness::run_experiment(app.experiment);
    fs::create_directories(c.out);
    write_text(fs::path(c.out) / "report.json", harness::emit_report(output.report, harness::ReportFormat::Json));
    write_text(fs::path(c.out) / "report.txt", harness::emit_report(output.report, harness::ReportFormat::Text));
    if (output.pipeline) recognizer::save_bundle(fs::path(c.out) / "pipeline", *output.pipeline);
    std::cout << harness::emit_report(output.report, format_of(c.format));
    return kExitOk;
}

int cmd_classify(const Common& c, const std::string& model_dir, const std::vector<std::string>& files) {
    recognizer::RecognizeOptions options;
    if (!c.config_path.empty()) options = config::load_config(c.config_path).recognize;
    const auto model = recognizer::load_bundle(model_dir);
    for (const auto& file : files) {
        const auto window = read_window_file(file);
        const auto result = recognizer::recognize(window, model, options);
        if (c.format == "json") {
            std::cout << recognizer::result_to_json(result);
        } else {
            if (files.size() > 1) std::cout << "== " << file << '\n';
            std::cout << recognizer::result_to_text(result);
        }
    }
    return kExitOk;
}

int cmd_report(const Common& c, const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError("cannot open report " + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::cout << harness::emit_report(harness::parse_report(buf.str()), format_of(c.format));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Activity and environment recognition from smartphone sensor windows"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--config", common.config_path, "YAML config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Random seed");
        sub->add_option("--iters-scale", common.iters_scale, "Fraction of the base iteration budget");
        sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "json"}));
        if (with_out) sub->add_option("--out", common.out, "Output directory")->required();
    };

    std::optional<std::size_t> count;
    std::string stage;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labelled dataset");
    add_common(synth_cmd, true);
    synth_cmd->add_option("--count", count, "Number of windows");
    synth_cmd->add_option("--stage", stage, "Balanced label: adl, env or standing");

    auto* train_cmd = app.add_subcommand("train", "Train a three-stage pipeline bundle");
    add_common(train_cmd, true);
    train_cmd->add_option("--data", common.data, "Dataset directory")->check(CLI::ExistingDirectory);

    auto* exp_cmd = app.add_subcommand("experiment", "Run the experiment grid");
    add_common(exp_cmd, true);
    exp_cmd->add_option("--data", common.data, "Dataset directory")->check(CLI::ExistingDirectory);

    std::string model_dir;
    std::vector<std::string> files;
    auto* classify_cmd = app.add_subcommand("classify", "Recognise activities in window files");
    add_common(classify_cmd, false);
    classify_cmd->add_option("--model", model_dir, "Pipeline bundle directory")->required()->check(CLI::ExistingDirectory);
    classify_cmd->add_option("windows", files, "Window files")->required()->check(CLI::ExistingFile);

    std::string report_file;
    auto* report_cmd = app.add_subcommand("report", "Re-render a machine-readable report");
    add_common(report_cmd, false);
    report_cmd->add_option("report", report_file, "report.json")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*synth_cmd) return cmd_synth(common, count, stage);
        if (*train_cmd) return cmd_train(common);
        if (*exp_cmd) return cmd_experiment(common);
        if (*classify_cmd) return cmd_classify(common, model_dir, files);
        if (*report_cmd) return cmd_report(common, report_file);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SensorUnavailableError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const UnsupportedDeviceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
