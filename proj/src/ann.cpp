#include "adl/ann.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <json.hpp>

#include "adl/error.hpp"

namespace adl::ann {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Gradients {
    std::vector<MatrixXd> weights;
    std::vector<VectorXd> biases;
};

struct Batch {
    MatrixXd inputs;   // features x samples
    MatrixXd targets;  // classes x samples, one-hot
    std::vector<std::size_t> labels;
};

MatrixXd sigmoid(const MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

/// Activations per layer; the last entry holds the output logits (pre-softmax).
std::vector<MatrixXd> forward_batch(const NeuralNet& net, const MatrixXd& inputs) {
    std::vector<MatrixXd> acts;
    acts.reserve(net.weights.size() + 1);
    acts.push_back(inputs);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        MatrixXd z = net.weights[l] * acts.back();
        z.colwise() += net.biases[l];
        acts.push_back(l + 1 < net.weights.size() ? sigmoid(z) : std::move(z));
    }
    return acts;
}

/// Column-wise softmax of `logits`; also returns the mean cross-entropy against `labels`.
MatrixXd softmax(const MatrixXd& logits, std::span<const std::size_t> labels, double* mean_ce) {
    MatrixXd probs(logits.rows(), logits.cols());
    double ce = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const double top = logits.col(c).maxCoeff();
        const VectorXd e = (logits.col(c).array() - top).exp().matrix();
        const double sum = e.sum();
        probs.col(c) = e / sum;
        if (!labels.empty()) {
            ce += std::log(sum) + top - logits(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(c)]), c);
        }
    }
    if (mean_ce) *mean_ce = labels.empty() ? 0.0 : ce / static_cast<double>(logits.cols());
    return probs;
}

/// Regularised mean loss; fills `grad` when non-null.
double loss_and_gradient(const NeuralNet& net, const Batch& batch, double l2_lambda, Gradients* grad,
                         double* data_loss) {
    const auto acts = forward_batch(net, batch.inputs);
    double ce = 0.0;
    const MatrixXd probs = softmax(acts.back(), batch.labels, &ce);
    if (data_loss) *data_loss = ce;
    const double loss = ce + 0.5 * l2_lambda * net.weight_norm_squared();
    if (!grad) return loss;

    const std::size_t n_layers = net.weights.size();
    grad->weights.resize(n_layers);
    grad->biases.resize(n_layers);
    MatrixXd delta = (probs - batch.targets) / static_cast<double>(batch.inputs.cols());
    for (std::size_t l = n_layers; l-- > 0;) {
        grad->weights[l].noalias() = delta * acts[l].transpose();
        grad->weights[l] += l2_lambda * net.weights[l];
        grad->biases[l] = delta.rowwise().sum();
        if (l > 0) {
            MatrixXd back = net.weights[l].transpose() * delta;
            delta = (back.array() * acts[l].array() * (1.0 - acts[l].array())).matrix();
        }
    }
    return loss;
}

Batch make_batch(std::span<const Sample> samples, const Topology& topology) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    Batch b{MatrixXd(static_cast<Eigen::Index>(topology.inputs()), n),
            MatrixXd::Zero(static_cast<Eigen::Index>(topology.outputs()), n), {}};
    b.labels.reserve(samples.size());
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto& s = samples[static_cast<std::size_t>(c)];
        if (s.features.size() != topology.inputs()) {
            throw DomainError("sample has " + std::to_string(s.features.size()) + " features, network expects " +
                              std::to_string(topology.inputs()));
        }
        if (s.label >= topology.outputs()) throw DomainError("label " + std::to_string(s.label) + " out of range");
        b.inputs.col(c) = Eigen::Map<const VectorXd>(s.features.data(), n == 0 ? 0 : b.inputs.rows());
        b.targets(static_cast<Eigen::Index>(s.label), c) = 1.0;
        b.labels.push_back(s.label);
    }
    return b;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string_view init_name(InitScheme s) { return s == InitScheme::FanIn ? "fan_in" : "fan_avg"; }

}  // namespace

std::string_view kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Mlp: return "MLP";
        case ModelKind::Fnn: return "FNN";
        case ModelKind::Dnn: return "DNN";
    }
    return "";
}

std::optional<ModelKind> parse_kind(std::string_view name) {
    for (auto k : {ModelKind::Mlp, ModelKind::Fnn, ModelKind::Dnn}) {
        std::string upper(name);
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
        if (kind_name(k) == upper) return k;
    }
    return std::nullopt;
}

void Topology::validate() const {
    if (layers.size() < 3) throw ConfigError("topology needs an input, at least one hidden, and an output layer");
    for (auto n : layers) {
        if (n == 0) throw ConfigError("topology layer sizes must be >= 1");
    }
}

std::size_t NeuralNet::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

double NeuralNet::weight_norm_squared() const {
    double s = 0.0;
    for (const auto& w : weights) s += w.squaredNorm();
    return s;
}

void TrainConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be non-negative");
    if (!(target_error >= 0.0)) throw ConfigError("target_error must be non-negative");
}

std::string TrainConfig::digest() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "iters=%zu;lr=%.17g;l2=%.17g;target=%.17g;batch=%zu;seed=%llu", max_iterations,
                  learning_rate, l2_lambda, target_error, batch_size, static_cast<unsigned long long>(seed));
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(buf)));
    return hex;
}

KindPreset preset(ModelKind kind, std::size_t inputs, std::size_t outputs) {
    switch (kind) {
        case ModelKind::Mlp: return {{{inputs, std::max<std::size_t>(8, 2 * inputs), outputs}}, InitScheme::FanIn, 0.0};
        case ModelKind::Fnn: return {{{inputs, std::max<std::size_t>(8, 2 * inputs), outputs}}, InitScheme::FanAvg, 0.0};
        case ModelKind::Dnn: return {{{inputs, 2 * inputs, inputs, inputs, outputs}}, InitScheme::FanIn, 1e-4};
    }
    throw ConfigError("unknown model kind");
}

NeuralNet init_network(const Topology& topology, std::uint64_t seed, InitScheme scheme) {
    topology.validate();
    NeuralNet net;
    net.topology = topology;
    net.init = scheme;
    net.seed = seed;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < topology.layers.size(); ++l) {
        const auto fan_in = static_cast<double>(topology.layers[l]);
        const auto fan_out = static_cast<double>(topology.layers[l + 1]);
        const double range = scheme == InitScheme::FanIn ? 1.0 / std::sqrt(fan_in) : 1.0 / std::sqrt((fan_in + fan_out) / 2.0);
        std::uniform_real_distribution<double> draw(-range, range);
        MatrixXd w(static_cast<Eigen::Index>(topology.layers[l + 1]), static_cast<Eigen::Index>(topology.layers[l]));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = draw(rng);
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(VectorXd::Zero(static_cast<Eigen::Index>(topology.layers[l + 1])));
    }
    return net;
}

std::vector<double> forward(const NeuralNet& net, std::span<const double> input) {
    if (input.size() != net.topology.inputs()) {
        throw DomainError("input has " + std::to_string(input.size()) + " features, network expects " +
                          std::to_string(net.topology.inputs()));
    }
    const MatrixXd x = Eigen::Map<const VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
    const auto acts = forward_batch(net, x);
    const MatrixXd probs = softmax(acts.back(), {}, nullptr);
    return {probs.data(), probs.data() + probs.size()};
}

std::size_t argmax(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

Prediction predict(const NeuralNet& net, std::span<const double> input) {
    Prediction p{0, forward(net, input)};
    p.label = argmax(p.scores);
    return p;
}

TrainResult train(NeuralNet net, std::span<const Sample> dataset, const TrainConfig& config) {
    config.validate();
    if (dataset.empty()) throw DomainError("train: empty dataset");
    const Batch all = make_batch(dataset, net.topology);
    const std::size_t n = dataset.size();
    const std::size_t batch_size = config.batch_size == 0 ? n : std::min(config.batch_size, n);

    TrainResult result;
    double data_loss = 0.0;
    auto record = [&](std::size_t iteration) {
        const double loss = loss_and_gradient(net, all, config.l2_lambda, nullptr, &data_loss);
        if (!std::isfinite(loss)) throw DivergenceError(iteration, loss);
        result.history.push_back(loss);
        result.final_loss = loss;
        result.reached_target = data_loss <= config.target_error;
        return result.reached_target;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(config.seed ^ 0x5bd1e995ULL);
    Gradients grad;
    Batch batch;
    std::size_t iteration = 0;
    bool done = record(0);
    while (!done && iteration < config.max_iterations) {
        if (batch_size < n) std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n && iteration < config.max_iterations; start += batch_size) {
            const Batch* step = &all;
            if (batch_size < n) {
                const auto count = static_cast<Eigen::Index>(std::min(batch_size, n - start));
                batch.inputs.resize(all.inputs.rows(), count);
                batch.targets.resize(all.targets.rows(), count);
                batch.labels.resize(static_cast<std::size_t>(count));
                for (Eigen::Index c = 0; c < count; ++c) {
                    const auto src = order[start + static_cast<std::size_t>(c)];
                    batch.inputs.col(c) = all.inputs.col(static_cast<Eigen::Index>(src));
                    batch.targets.col(c) = all.targets.col(static_cast<Eigen::Index>(src));
                    batch.labels[static_cast<std::size_t>(c)] = all.labels[src];
                }
                step = &batch;
            }
            const double loss = loss_and_gradient(net, *step, config.l2_lambda, &grad, nullptr);
            if (!std::isfinite(loss)) throw DivergenceError(iteration, loss);
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                net.weights[l] -= config.learning_rate * grad.weights[l];
                net.biases[l] -= config.learning_rate * grad.biases[l];
            }
            ++iteration;
        }
        done = record(iteration);
    }
    result.iterations = iteration;
    net.train_digest = config.digest();
    result.net = std::move(net);
    return result;
}

namespace {

// Single-sample regularised loss in extended precision, so that the finite
// differences are not dominated by rounding in the loss itself.
long double precise_loss(const NeuralNet& net, const Sample& sample, double l2_lambda) {
    std::vector<long double> a(sample.features.begin(), sample.features.end());
    long double penalty = 0.0L;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const auto& w = net.weights[l];
        std::vector<long double> z(static_cast<std::size_t>(w.rows()));
        for (Eigen::Index j = 0; j < w.rows(); ++j) {
            long double acc = net.biases[l](j);
            for (Eigen::Index i = 0; i < w.cols(); ++i) {
                acc += static_cast<long double>(w(j, i)) * a[static_cast<std::size_t>(i)];
                penalty += static_cast<long double>(w(j, i)) * w(j, i);
            }
            z[static_cast<std::size_t>(j)] = acc;
        }
        if (l + 1 < net.weights.size()) {
            for (auto& v : z) v = 1.0L / (1.0L + std::exp(-v));
        }
        a = std::move(z);
    }
    const long double top = *std::max_element(a.begin(), a.end());
    long double sum = 0.0L;
    for (long double v : a) sum += std::exp(v - top);
    const long double log_p = a[sample.label] - top - std::log(sum);
    return -log_p + 0.5L * static_cast<long double>(l2_lambda) * penalty;
}

}  // namespace

double gradient_check(const NeuralNet& net, const Sample& sample, double epsilon, double l2_lambda) {
    const Batch batch = make_batch(std::span(&sample, 1), net.topology);
    Gradients analytic;
    loss_and_gradient(net, batch, l2_lambda, &analytic, nullptr);

    double worst = 0.0;
    NeuralNet probe = net;
    auto check = [&](double& param, double g_analytic) {
        const double saved = param;
        param = saved + epsilon;
        const long double up = precise_loss(probe, sample, l2_lambda);
        param = saved - epsilon;
        const long double down = precise_loss(probe, sample, l2_lambda);
        param = saved;
        const auto g_numeric = static_cast<double>((up - down) / (2.0L * epsilon));
        const double err = std::abs(g_analytic - g_numeric) / std::max(1e-12, std::abs(g_analytic) + std::abs(g_numeric));
        worst = std::max(worst, err);
    };
    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (Eigen::Index r = 0; r < probe.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < probe.weights[l].cols(); ++c) check(probe.weights[l](r, c), analytic.weights[l](r, c));
            check(probe.biases[l](r), analytic.biases[l](r));
        }
    }
    return worst;
}

std::string save_model(const NeuralNet& net) {
    nlohmann::ordered_json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["kind"] = std::string(kind_name(net.kind));
    doc["init"] = std::string(init_name(net.init));
    doc["topology"] = net.topology.layers;
    doc["activations"] = {{"hidden", "sigmoid"}, {"output", "softmax"}};
    doc["seed"] = net.seed;
    doc["train_config_digest"] = net.train_digest;
    auto weights = nlohmann::ordered_json::array();
    auto biases = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(net.weights[l].size()));
        for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) flat.push_back(net.weights[l](r, c));
        }
        weights.push_back(flat);
        biases.push_back(std::vector<double>(net.biases[l].data(), net.biases[l].data() + net.biases[l].size()));
    }
    doc["weights"] = std::move(weights);
    doc["biases"] = std::move(biases);
    return doc.dump(1) + "\n";
}

NeuralNet load_model(std::string_view document, const std::optional<Topology>& expected) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("model document is not readable: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != kModelFormatVersion) {
            throw LoadError("unsupported model format version " + doc.at("format_version").dump());
        }
        NeuralNet net;
        auto kind = parse_kind(doc.at("kind").get<std::string>());
        if (!kind) throw LoadError("unknown model kind " + doc.at("kind").dump());
        net.kind = *kind;
        const auto init = doc.at("init").get<std::string>();
        if (init != "fan_in" && init != "fan_avg") throw LoadError("unknown init scheme " + init);
        net.init = init == "fan_in" ? InitScheme::FanIn : InitScheme::FanAvg;
        net.topology.layers = doc.at("topology").get<std::vector<std::size_t>>();
        try {
            net.topology.validate();
        } catch (const ConfigError& e) {
            throw LoadError(e.what());
        }
        if (expected && *expected != net.topology) throw LoadError("model topology does not match the expected shape");
        if (doc.at("activations").at("hidden") != "sigmoid" || doc.at("activations").at("output") != "softmax") {
            throw LoadError("unsupported activations");
        }
        net.seed = doc.at("seed").get<std::uint64_t>();
        net.train_digest = doc.at("train_config_digest").get<std::string>();

        const auto& weights = doc.at("weights");
        const auto& biases = doc.at("biases");
        const std::size_t n_layers = net.topology.layers.size() - 1;
        if (weights.size() != n_layers || biases.size() != n_layers) throw LoadError("layer count does not match topology");
        for (std::size_t l = 0; l < n_layers; ++l) {
            const auto rows = net.topology.layers[l + 1];
            const auto cols = net.topology.layers[l];
            const auto flat = weights[l].get<std::vector<double>>();
            const auto bias = biases[l].get<std::vector<double>>();
            if (flat.size() != rows * cols || bias.size() != rows) {
                throw LoadError("parameter shape mismatch in layer " + std::to_string(l));
            }
            MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * cols + c];
            }
            net.weights.push_back(std::move(w));
            net.biases.push_back(Eigen::Map<const VectorXd>(bias.data(), static_cast<Eigen::Index>(rows)));
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("model document is malformed: ") + e.what());
    }
}

}  // namespace adl::ann
