#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "sentdist/ingest.hpp"
#include "sentdist/phase.hpp"
#include "sentdist/types.hpp"

namespace sentdist {

struct ModelParams {
    std::vector<double> weights;
    double bias = 0.0;

    static ModelParams zeros(std::size_t dimension);
    std::size_t dimension() const { return weights.size(); }
};

struct Hyperparams {
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    double train_fraction = 0.7;
    double l2 = 0.0;
    std::uint64_t shuffle_seed = 7;

    void validate() const;
};

struct Metrics {
    double accuracy = 0.0;
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    // confusion[actual][predicted]
    std::array<std::array<std::uint64_t, 2>, 2> confusion{};
};

// Mean gradient of the regularized log loss over some example set, plus the
// number of examples it came from so that aggregation can reweight.
struct GradientVector {
    std::vector<double> d_weights;
    double d_bias = 0.0;
    std::uint64_t example_count = 0;
};

double stable_sigmoid(double z);

// P(label=1 | x).
double forward(const ModelParams& params, const EmbeddingVector& x);

// Mean log loss plus (l2/2)*|w|^2. Computed via softplus so that extreme
// logits cannot produce inf or NaN.
double batch_loss(const ModelParams& params, std::span<const LabeledExample> batch, double l2);

// Mean over the batch of (sigmoid(z)-y)*x, bias analog, plus l2*w.
GradientVector batch_gradient(const ModelParams& params, std::span<const LabeledExample> batch,
                              double l2);

// w -= lr * d_weights; b -= lr * d_bias.
void sgd_step(ModelParams& params, const GradientVector& grad, double learning_rate);

// Seeded shuffle, then the first ceil(fraction*n) examples become the
// training set and the rest the validation set.
std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split(
    std::vector<LabeledExample> dataset, double fraction, std::uint64_t seed);

// Threshold at 0.5; ties predict positive.
Metrics evaluate(const ModelParams& params, std::span<const LabeledExample> dataset);

struct TrainOptions {
    // Record full training-set loss after every epoch. Off by default: it
    // adds a forward pass per epoch, which would distort phase timings used
    // for cost calibration.
    bool record_epoch_loss = false;
};

struct TrainResult {
    ModelParams params;
    Metrics metrics;
    PhaseReport phases;
    std::vector<double> epoch_losses;  // filled when record_epoch_loss is set
    std::size_t train_examples = 0;
    std::size_t validation_examples = 0;
};

// Full single-node pipeline: preprocess, embed, split, mini-batch SGD from
// zero-initialized parameters, evaluate on the held-out set.
TrainResult train_single(std::span<const Document> docs, const Hyperparams& hp,
                         const EmbedderConfig& embedder, const TrainOptions& opts = {});

// Same, starting from already-embedded examples (no preprocess/embed phases).
TrainResult train_single_examples(std::vector<LabeledExample> examples, const Hyperparams& hp,
                                  const TrainOptions& opts = {});

// Checkpoint format: header "dim=<d>", then bias and each weight as decimal
// text, one value per line.
void save_params(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace sentdist
