#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace adl::ann {

enum class ModelKind { Mlp, Fnn, Dnn };

std::string_view kind_name(ModelKind kind);
std::optional<ModelKind> parse_kind(std::string_view name);

/// Uniform weight ranges: FanIn = 1/sqrt(fan_in), FanAvg = 1/sqrt((fan_in + fan_out) / 2).
enum class InitScheme { FanIn, FanAvg };

/// Layer sizes (input, hidden..., output). Hidden layers use sigmoid, the output softmax.
struct Topology {
    std::vector<std::size_t> layers;

    std::size_t inputs() const { return layers.front(); }
    std::size_t outputs() const { return layers.back(); }
    void validate() const;
    bool operator==(const Topology&) const = default;
};

struct NeuralNet {
    Topology topology;
    ModelKind kind = ModelKind::Mlp;
    InitScheme init = InitScheme::FanIn;
    std::uint64_t seed = 0;
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: layers[l+1] x layers[l]
    std::vector<Eigen::VectorXd> biases;
    std::string train_digest;  // digest of the TrainConfig that produced the parameters

    std::size_t parameter_count() const;
    double weight_norm_squared() const;
};

struct TrainConfig {
    std::size_t max_iterations = 10'000;
    double learning_rate = 0.1;
    double l2_lambda = 0.0;
    double target_error = 1e-3;  // mean cross-entropy that stops training early
    std::size_t batch_size = 64;  // 0 or >= dataset size: full batch
    std::uint64_t seed = 0;       // network init and batch shuffling

    void validate() const;
    std::string digest() const;
};

struct KindPreset {
    Topology topology;
    InitScheme init;
    double l2_lambda;
};

/// MLP/FNN: one hidden layer of max(8, 2*inputs); DNN: [2*inputs, inputs, inputs] with L2.
KindPreset preset(ModelKind kind, std::size_t inputs, std::size_t outputs);

NeuralNet init_network(const Topology& topology, std::uint64_t seed, InitScheme scheme = InitScheme::FanIn);

/// Class probabilities for one input.
std::vector<double> forward(const NeuralNet& net, std::span<const double> input);

struct Prediction {
    std::size_t label = 0;
    std::vector<double> scores;
};

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

/// Class probabilities plus their argmax.
Prediction predict(const NeuralNet& net, std::span<const double> input);

struct Sample {
    std::vector<double> features;
    std::size_t label = 0;
};

struct TrainResult {
    NeuralNet net;
    std::vector<double> history;  // regularised full-dataset loss at the start and after each epoch
    std::size_t iterations = 0;   // parameter updates performed
    double final_loss = 0.0;
    bool reached_target = false;
};

/// Gradient descent on mean cross-entropy + (l2_lambda / 2) * sum(w^2); biases are not penalised.
/// One iteration is one parameter update. Batches are drawn from a per-epoch shuffle seeded by
/// config.seed; the target error is checked on the whole dataset at each epoch boundary.
TrainResult train(NeuralNet net, std::span<const Sample> dataset, const TrainConfig& config);

/// Max over parameters of |analytic - numeric| / max(1e-12, |analytic| + |numeric|)
/// using central differences on the regularised single-sample loss.
double gradient_check(const NeuralNet& net, const Sample& sample, double epsilon, double l2_lambda = 0.0);

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const NeuralNet& net);
/// Throws LoadError on malformed documents, version mismatch, or when `expected` differs from the stored topology.
NeuralNet load_model(std::string_view document, const std::optional<Topology>& expected = std::nullopt);

}  // namespace adl::ann
