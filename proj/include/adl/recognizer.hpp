#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adl/ann.hpp"
#include "adl/fusion.hpp"
#include "adl/ingest.hpp"
#include "adl/labels.hpp"

namespace adl::recognizer {

/// One trained stage: feature recipe, classifier and (optionally) its normalizer.
struct StageModel {
    Stage stage = Stage::Adl;
    int combination = 1;
    int variant = 5;
    ann::ModelKind kind = ann::ModelKind::Dnn;
    ann::NeuralNet net;
    std::optional<fusion::Normalizer> normalizer;  // empty = non-normalized stage
};

struct PipelineModel {
    fusion::FusionConfig fusion = fusion::FusionConfig::defaults();
    StageModel adl;
    StageModel env;
    StageModel standing;
    /// Feed stage-2 scores instead of the argmax one-hot into stage 3.
    bool env_soft_scores = false;

    const StageModel& stage(Stage s) const;
    void validate() const;
};

template <typename Label>
struct StageOutput {
    Label label{};
    std::vector<double> scores;
};

struct ActivityResult {
    StageOutput<AdlLabel> adl;
    std::optional<StageOutput<EnvLabel>> environment;
    std::optional<StageOutput<StandingLabel>> standing;
    int combination = 0;  // of the deepest stage that ran
    int variant = 0;
};

struct RecognizeOptions {
    /// Raise SensorUnavailableError (stage "standing") instead of skipping stage 3 when a
    /// standing verdict lacks audio or GPS.
    bool strict_gating = false;
};

/// Builds, normalizes and classifies the stage's feature vector.
ann::Prediction run_stage(const SensorWindow& window, const StageModel& model, const fusion::FusionConfig& fusion,
                          std::optional<std::string_view> env_label = std::nullopt,
                          const std::vector<double>* env_scores = nullptr);

StageOutput<AdlLabel> recognize_stage1(const SensorWindow& window, const PipelineModel& model);
StageOutput<EnvLabel> recognize_stage2(const SensorWindow& window, const PipelineModel& model);
StageOutput<StandingLabel> recognize_stage3(const SensorWindow& window, const StageOutput<EnvLabel>& env,
                                            const PipelineModel& model);

/// Stage 1 always; stage 2 when audio is present; stage 3 when stage 1 says standing and
/// stage 2 ran and GPS is present.
ActivityResult recognize(const SensorWindow& window, const PipelineModel& model, const RecognizeOptions& options = {});

/// Per-stage training recipe.
struct StageSpec {
    int combination = 3;
    int variant = 5;
    ann::ModelKind kind = ann::ModelKind::Dnn;
    bool normalized = true;
};

struct PipelineSpec {
    /// DNN + normalization for stages 1 and 3, FNN without normalization for stage 2.
    StageSpec adl{3, 5, ann::ModelKind::Dnn, true};
    StageSpec env{3, 5, ann::ModelKind::Fnn, false};
    StageSpec standing{3, 5, ann::ModelKind::Dnn, true};
    bool env_soft_scores = false;
    ann::TrainConfig train;
    std::optional<double> l2_override;  // otherwise the kind preset's l2
};

/// Labelled samples for one stage; windows lacking the stage label (or its sensors) are skipped.
struct StageData {
    std::vector<fusion::FeatureVector> vectors;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> window_index;
};

/// Stage 3 uses each window's ground-truth environment label as context.
StageData collect_stage_data(std::span<const SensorWindow> windows, Stage stage, int combination, int variant,
                             const fusion::FusionConfig& fusion);

/// Fits normalizer (if requested) on `data` and trains the stage classifier.
StageModel train_stage(const StageData& data, Stage stage, const StageSpec& spec, const ann::TrainConfig& train,
                       std::optional<double> l2_override = std::nullopt, ann::TrainResult* details = nullptr);

PipelineModel train_pipeline(std::span<const SensorWindow> windows, const PipelineSpec& spec,
                             const fusion::FusionConfig& fusion = fusion::FusionConfig::defaults());

inline constexpr int kBundleFormatVersion = 1;

/// Directory with manifest.json plus one model document per stage.
void save_bundle(const std::filesystem::path& dir, const PipelineModel& model);
PipelineModel load_bundle(const std::filesystem::path& dir);

std::string result_to_json(const ActivityResult& result);
std::string result_to_text(const ActivityResult& result);

}  // namespace adl::recognizer
