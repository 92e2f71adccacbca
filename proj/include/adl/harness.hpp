#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adl/ann.hpp"
#include "adl/fusion.hpp"
#include "adl/recognizer.hpp"
#include "adl/synth.hpp"

namespace adl::harness {

enum class Normalization { On, Off, Both };

struct ExperimentConfig {
    std::optional<std::filesystem::path> dataset_dir;  // otherwise `synth` is generated
    synth::SynthSpec synth;
    double split_ratio = 0.7;
    std::uint64_t seed = 42;

    std::vector<Stage> stages{Stage::Standing};
    std::vector<int> combinations{1, 2, 3};
    std::vector<int> variants{1, 2, 3, 4, 5};
    std::vector<ann::ModelKind> kinds{ann::ModelKind::Mlp, ann::ModelKind::Fnn, ann::ModelKind::Dnn};
    Normalization normalization = Normalization::Both;

    /// max_iterations = round(base_iterations * iters_scale); the grid used 10^6, 2x10^6 and 4x10^6.
    std::size_t base_iterations = 1'000'000;
    double iters_scale = 1e-2;
    ann::TrainConfig train;
    std::optional<double> l2_override;

    fusion::FusionConfig fusion = fusion::FusionConfig::defaults();
    /// Raw feature channels multiplied by a factor before any normalizer is fitted.
    std::map<std::string, double> feature_scales;
    std::size_t workers = 1;

    std::size_t max_iterations() const;
    void validate() const;
};

struct Split {
    std::vector<std::size_t> train;  // ascending indices
    std::vector<std::size_t> test;
};

/// Stratified by label; per class round(ratio * n) clamped to [1, n - 1] go to train.
Split split_indices(std::span<const std::size_t> labels, double ratio, std::uint64_t seed);
/// Windows without a label for `stage` are ignored.
std::pair<std::vector<SensorWindow>, std::vector<SensorWindow>> split_dataset(std::span<const SensorWindow> windows,
                                                                              Stage stage, double ratio,
                                                                              std::uint64_t seed);

using Confusion = std::vector<std::vector<std::size_t>>;  // [true][predicted]

struct Evaluation {
    double accuracy = 0.0;  // percent
    Confusion confusion;
};

Evaluation evaluate(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t classes);
Evaluation evaluate(const ann::NeuralNet& net, std::span<const ann::Sample> test);
/// Scores one pipeline stage on windows carrying that stage's label (stage 3 uses the true environment).
Evaluation evaluate(const recognizer::PipelineModel& pipeline, std::span<const SensorWindow> test, Stage stage);

struct CellResult {
    Stage stage = Stage::Standing;
    int combination = 1;
    int variant = 1;
    ann::ModelKind kind = ann::ModelKind::Mlp;
    bool normalized = false;
    bool failed = false;
    std::string diagnostic;
    double accuracy = 0.0;
    Confusion confusion;
    std::size_t iterations = 0;
    double final_loss = 0.0;
    double wall_seconds = 0.0;  // text report only
};

struct StageBest {
    Stage stage = Stage::Standing;
    std::size_t cell = 0;
    double accuracy = 0.0;
};

inline constexpr int kReportSchemaVersion = 1;

struct ExperimentReport {
    std::uint64_t seed = 0;
    std::string dataset_digest;
    std::string config_digest;
    std::size_t max_iterations = 0;
    std::vector<CellResult> cells;
    std::vector<StageBest> best;
    double average_accuracy = 0.0;  // mean of the per-stage bests
};

struct ExperimentOutput {
    ExperimentReport report;
    /// Assembled from the best cell of each stage when all three stages were evaluated.
    std::optional<recognizer::PipelineModel> pipeline;
};

std::vector<SensorWindow> load_windows(const ExperimentConfig& config);
std::string dataset_digest(std::span<const SensorWindow> windows);

ExperimentOutput run_experiment(const ExperimentConfig& config);
ExperimentOutput run_experiment(const ExperimentConfig& config, std::span<const SensorWindow> windows);

enum class ReportFormat { Text, Json };

std::string emit_report(const ExperimentReport& report, ReportFormat format);
ExperimentReport parse_report(std::string_view json);

}  // namespace adl::harness
