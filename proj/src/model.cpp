#include "sentdist/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "sentdist/clock.hpp"
#include "sentdist/rng.hpp"
#include "sentdist/text.hpp"

namespace sentdist {

ModelParams ModelParams::zeros(std::size_t dimension) {
    ModelParams p;
    p.weights.assign(dimension, 0.0);
    p.bias = 0.0;
    return p;
}

void Hyperparams::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("train.learning_rate must be positive and finite");
    }
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    // epochs == 0 is legal: training returns the zero initialization untouched.
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ConfigError("train.train_fraction must be in (0, 1)");
    }
    if (l2 < 0.0 || !std::isfinite(l2)) throw ConfigError("train.l2 must be >= 0 and finite");
}

double stable_sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

inline double dot_plus_bias(const ModelParams& params, const EmbeddingVector& x) {
    require(x.size() == params.weights.size(), "feature dimension does not match model");
    double z = params.bias;
    const double* w = params.weights.data();
    const double* xv = x.data();
    for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * xv[j];
    return z;
}

// log(1 + exp(z)) without overflow for large |z|.
inline double softplus(double z) {
    double m = z > 0.0 ? z : 0.0;
    return m + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

double forward(const ModelParams& params, const EmbeddingVector& x) {
    return stable_sigmoid(dot_plus_bias(params, x));
}

double batch_loss(const ModelParams& params, std::span<const LabeledExample> batch, double l2) {
    require(!batch.empty(), "batch_loss: empty batch");
    double sum = 0.0;
    for (const LabeledExample& ex : batch) {
        double z = dot_plus_bias(params, ex.features);
        // Per-example log loss: softplus(z) - y*z. Equals -log(sigmoid(z))
        // for y=1 and -log(1-sigmoid(z)) for y=0, computed without inf/NaN.
        sum += softplus(z) - static_cast<double>(ex.label) * z;
    }
    double loss = sum / static_cast<double>(batch.size());
    if (l2 > 0.0) {
        double wsq = 0.0;
        for (double w : params.weights) wsq += w * w;
        loss += 0.5 * l2 * wsq;
    }
    return loss;
}

GradientVector batch_gradient(const ModelParams& params, std::span<const LabeledExample> batch,
                              double l2) {
    require(!batch.empty(), "batch_gradient: empty batch");
    const std::size_t d = params.weights.size();
    GradientVector g;
    g.d_weights.assign(d, 0.0);
    for (const LabeledExample& ex : batch) {
        double z = dot_plus_bias(params, ex.features);
        double err = stable_sigmoid(z) - static_cast<double>(ex.label);
        const double* xv = ex.features.data();
        double* gw = g.d_weights.data();
        for (std::size_t j = 0; j < d; ++j) gw[j] += err * xv[j];
        g.d_bias += err;
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    for (double& gj : g.d_weights) gj *= inv;
    g.d_bias *= inv;
    if (l2 > 0.0) {
        for (std::size_t j = 0; j < d; ++j) g.d_weights[j] += l2 * params.weights[j];
    }
    g.example_count = batch.size();
    return g;
}

void sgd_step(ModelParams& params, const GradientVector& grad, double learning_rate) {
    require(grad.d_weights.size() == params.weights.size(),
            "sgd_step: gradient dimension does not match model");
    double* w = params.weights.data();
    const double* g = grad.d_weights.data();
    for (std::size_t j = 0; j < params.weights.size(); ++j) w[j] -= learning_rate * g[j];
    params.bias -= learning_rate * grad.d_bias;
}

std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split(
    std::vector<LabeledExample> dataset, double fraction, std::uint64_t seed) {
    require(!dataset.empty(), "split: empty dataset");
    require(fraction > 0.0 && fraction < 1.0, "split: fraction must be in (0, 1)");
    SplitMix64 g(seed);
    deterministic_shuffle(dataset, g);
    std::size_t n = dataset.size();
    auto train_count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (train_count < 1) train_count = 1;
    if (train_count > n) train_count = n;
    std::vector<LabeledExample> val(std::make_move_iterator(dataset.begin() +
                                                            static_cast<std::ptrdiff_t>(train_count)),
                                    std::make_move_iterator(dataset.end()));
    dataset.resize(train_count);
    return {std::move(dataset), std::move(val)};
}

Metrics evaluate(const ModelParams& params, std::span<const LabeledExample> dataset) {
    require(!dataset.empty(), "evaluate: empty dataset");
    Metrics m;
    for (const LabeledExample& ex : dataset) {
        double p = forward(params, ex.features);
        int predicted = p >= 0.5 ? 1 : 0;
        require(ex.label == 0 || ex.label == 1, "evaluate: label must be 0 or 1");
        m.confusion[static_cast<std::size_t>(ex.label)][static_cast<std::size_t>(predicted)]++;
        if (predicted == ex.label) ++m.correct;
    }
    m.total = dataset.size();
    m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.total);
    return m;
}

namespace {

// Mini-batch SGD over a pre-split training set, from zero parameters.
// Shuffles with mix_seed(shuffle_seed, epoch) before each epoch; batch
// boundaries walk the shuffled order. The distributed lockstep trainer
// replays exactly this schedule, so keep the two in sync.
ModelParams run_sgd(std::vector<LabeledExample>& train, const Hyperparams& hp,
                    const TrainOptions& opts, PhaseReport& pr, std::vector<double>& epoch_losses) {
    const std::size_t d = train[0].features.size();
    ModelParams params = ModelParams::zeros(d);
    PhaseStat& stat = pr.at(Phase::Train);
    for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
        StopWatch wall;
        double cpu0 = thread_cpu_seconds();
        SplitMix64 g(mix_seed(hp.shuffle_seed, epoch));
        deterministic_shuffle(train, g);
        for (std::size_t off = 0; off < train.size(); off += hp.batch_size) {
            std::size_t m = std::min(hp.batch_size, train.size() - off);
            GradientVector grad =
                batch_gradient(params, std::span<const LabeledExample>(train.data() + off, m), hp.l2);
            sgd_step(params, grad, hp.learning_rate);
            ++pr.steps;
        }
        stat.wall_seconds += wall.seconds();
        stat.sim_seconds += thread_cpu_seconds() - cpu0;
        if (opts.record_epoch_loss) {
            epoch_losses.push_back(batch_loss(params, train, hp.l2));
        }
    }
    return params;
}

}  // namespace

TrainResult train_single_examples(std::vector<LabeledExample> examples, const Hyperparams& hp,
                                  const TrainOptions& opts) {
    hp.validate();
    require(!examples.empty(), "train: no examples");

    TrainResult result;
    auto [train, val] = split(std::move(examples), hp.train_fraction, hp.shuffle_seed);
    result.train_examples = train.size();
    result.validation_examples = val.size();

    result.params = run_sgd(train, hp, opts, result.phases, result.epoch_losses);

    require(!val.empty(), "train: validation split is empty");
    {
        StopWatch wall;
        double cpu0 = thread_cpu_seconds();
        result.metrics = evaluate(result.params, val);
        PhaseStat& stat = result.phases.at(Phase::Evaluate);
        stat.wall_seconds = wall.seconds();
        stat.sim_seconds = thread_cpu_seconds() - cpu0;
    }
    return result;
}

TrainResult train_single(std::span<const Document> docs, const Hyperparams& hp,
                         const EmbedderConfig& embedder, const TrainOptions& opts) {
    hp.validate();
    embedder.validate();
    require(!docs.empty(), "train: no documents");

    PhaseReport pr;
    std::vector<TokenList> tokens(docs.size());
    {
        StopWatch wall;
        double cpu0 = thread_cpu_seconds();
        for (std::size_t i = 0; i < docs.size(); ++i) tokens[i] = preprocess(docs[i].raw_text);
        PhaseStat& stat = pr.at(Phase::Preprocess);
        stat.wall_seconds = wall.seconds();
        stat.sim_seconds = thread_cpu_seconds() - cpu0;
    }

    std::vector<LabeledExample> examples(docs.size());
    {
        StopWatch wall;
        double cpu0 = thread_cpu_seconds();
        for (std::size_t i = 0; i < docs.size(); ++i) {
            examples[i].features = embed(tokens[i], embedder);
            examples[i].label = docs[i].label == Sentiment::Positive ? 1 : 0;
        }
        PhaseStat& stat = pr.at(Phase::Embedding);
        stat.wall_seconds = wall.seconds();
        stat.sim_seconds = thread_cpu_seconds() - cpu0;
    }
    tokens.clear();
    tokens.shrink_to_fit();

    TrainResult result = train_single_examples(std::move(examples), hp, opts);
    result.phases.at(Phase::Preprocess) = pr.at(Phase::Preprocess);
    result.phases.at(Phase::Embedding) = pr.at(Phase::Embedding);
    return result;
}

void save_params(const std::filesystem::path& path, const ModelParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
    out << "dim=" << params.weights.size() << '\n';
    out << format_double(params.bias) << '\n';
    for (double w : params.weights) out << format_double(w) << '\n';
    if (!out.flush()) throw IoError("failed writing checkpoint: " + path.string());
}

ModelParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("checkpoint is empty: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("dim=", 0) != 0) throw DataError("checkpoint missing dim= header");
    std::uint64_t dim = 0;
    if (!parse_u64(std::string_view(line).substr(4), dim)) {
        throw DataError("checkpoint has invalid dim= header");
    }
    ModelParams params;
    params.weights.reserve(dim);
    std::size_t index = 0;  // 0 is bias, 1..dim are weights
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double value = 0.0;
        if (!parse_double(line, value)) {
            throw DataError("checkpoint has invalid value at entry " + std::to_string(index));
        }
        if (index == 0) {
            params.bias = value;
        } else {
            params.weights.push_back(value);
        }
        ++index;
    }
    if (params.weights.size() != dim) {
        throw DataError("checkpoint value count does not match dim= header");
    }
    return params;
}

}  // namespace sentdist
