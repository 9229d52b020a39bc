#include "sentdist/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "sentdist/clock.hpp"
#include "sentdist/rng.hpp"

namespace sentdist {

namespace {

// Serialized metrics message: four confusion counters plus the accuracy.
constexpr std::uint64_t kMetricsRecordBytes = 5 * 8;

}  // namespace

void ClusterConfig::validate() const {
    if (worker_count < 1 || worker_count > 4096) {
        throw ConfigError("cluster.workers must be in [1, 4096]");
    }
    if (cores_per_worker < 1) throw ConfigError("cluster.cores_per_worker must be >= 1");
    if (!(ram_gb_per_worker > 0.0)) throw ConfigError("cluster.ram_gb_per_worker must be > 0");
    if (master_cores < 1) throw ConfigError("cluster.master_cores must be >= 1");
    if (!(master_ram_gb > 0.0)) throw ConfigError("cluster.master_ram_gb must be > 0");
}

void NetworkModel::validate() const {
    if (!(bandwidth_gbps > 0.0) || !std::isfinite(bandwidth_gbps)) {
        throw ConfigError("network.bandwidth_gbps must be positive and finite");
    }
    if (latency_us < 0.0 || !std::isfinite(latency_us)) {
        throw ConfigError("network.latency_us must be >= 0 and finite");
    }
    if (float_bytes < 1) throw ConfigError("network.float_bytes must be >= 1");
}

double simulate_transfer(std::uint64_t bytes, const NetworkModel& net) {
    return net.latency_us * 1e-6 +
           static_cast<double>(bytes) * 8.0 / (net.bandwidth_gbps * 1e9);
}

std::vector<std::size_t> partition_sizes(std::size_t n, std::size_t k) {
    require(k >= 1, "partition: worker count must be >= 1");
    require(k <= n, "partition: more workers than rows");
    std::vector<std::size_t> sizes(k, n / k);
    for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
    return sizes;
}

std::vector<PartitionSlice> partition(std::span<const LabeledExample> train_set, std::size_t k) {
    auto sizes = partition_sizes(train_set.size(), k);
    std::vector<PartitionSlice> slices(k);
    std::size_t off = 0;
    for (std::size_t i = 0; i < k; ++i) {
        slices[i] = {i, off, sizes[i]};
        off += sizes[i];
    }
    return slices;
}

GradientVector worker_gradient(const ModelParams& params, std::span<const LabeledExample> slice,
                               double l2) {
    require(!slice.empty(), "worker_gradient: empty slice");
    return batch_gradient(params, slice, l2);
}

GradientVector aggregate(std::span<const GradientVector> grads) {
    require(!grads.empty(), "aggregate: no gradients");
    std::uint64_t total = 0;
    std::size_t d = 0;
    bool have_d = false;
    for (const GradientVector& g : grads) {
        if (g.example_count == 0) continue;
        total += g.example_count;
        if (!have_d) {
            d = g.d_weights.size();
            have_d = true;
        } else {
            require(g.d_weights.size() == d, "aggregate: gradient dimensions differ");
        }
    }
    require(total >= 1, "aggregate: no gradient carries examples");

    GradientVector out;
    out.d_weights.assign(d, 0.0);
    out.example_count = total;
    for (const GradientVector& g : grads) {
        if (g.example_count == 0) continue;
        double w = static_cast<double>(g.example_count) / static_cast<double>(total);
        const double* gw = g.d_weights.data();
        for (std::size_t j = 0; j < d; ++j) out.d_weights[j] += w * gw[j];
        out.d_bias += w * g.d_bias;
    }
    return out;
}

WorkerPool::WorkerPool(std::size_t worker_count) {
    require(worker_count >= 1, "WorkerPool: worker_count must be >= 1");
    threads_.reserve(worker_count);
    for (std::size_t i = 0; i < worker_count; ++i) {
        threads_.emplace_back([this, i] { worker_loop(i); });
    }
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
    }
    cv_work_.notify_all();
    for (std::thread& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(std::size_t)>& task) {
    std::unique_lock<std::mutex> lk(mu_);
    task_ = &task;
    first_error_ = nullptr;
    ++generation_;
    remaining_ = threads_.size();
    cv_work_.notify_all();
    cv_done_.wait(lk, [&] { return remaining_ == 0; });
    task_ = nullptr;
    if (first_error_) {
        std::exception_ptr e = first_error_;
        first_error_ = nullptr;
        std::rethrow_exception(e);
    }
}

void WorkerPool::worker_loop(std::size_t worker_id) {
    std::uint64_t seen = 0;
    std::unique_lock<std::mutex> lk(mu_);
    while (true) {
        cv_work_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        const std::function<void(std::size_t)>* task = task_;
        lk.unlock();
        try {
            (*task)(worker_id);
        } catch (...) {
            lk.lock();
            if (!first_error_) first_error_ = std::current_exception();
            if (--remaining_ == 0) cv_done_.notify_one();
            continue;
        }
        lk.lock();
        if (--remaining_ == 0) cv_done_.notify_one();
    }
}

namespace {

struct Share {
    std::size_t begin = 0;
    std::size_t count = 0;
};

// Contiguous near-equal split of m items across k workers; trailing workers
// may get nothing when m < k.
Share share_of(std::size_t m, std::size_t k, std::size_t wid) {
    std::size_t base = m / k;
    std::size_t rem = m % k;
    Share s;
    s.count = base + (wid < rem ? 1 : 0);
    s.begin = wid * base + std::min(wid, rem);
    return s;
}

GradientVector zero_gradient(std::size_t d) {
    GradientVector g;
    g.d_weights.assign(d, 0.0);
    return g;
}

void record_sync_event(PhaseReport& pr, std::size_t k, std::uint64_t message_bytes,
                       const NetworkModel& net) {
    double t = simulate_transfer(message_bytes, net);
    for (std::size_t i = 0; i < k; ++i) {
        pr.add_transfer({Phase::ModelSynchronization, static_cast<int>(i + 1), 0, message_bytes, t});
        pr.add_transfer({Phase::ModelSynchronization, 0, static_cast<int>(i + 1), message_bytes, t});
    }
}

// In-place Fisher-Yates over a subrange of the training vector.
void shuffle_range(std::vector<LabeledExample>& v, std::size_t begin, std::size_t count,
                   SplitMix64& g) {
    for (std::size_t i = count; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(g.next_below(i));
        std::swap(v[begin + i - 1], v[begin + j]);
    }
}

ModelParams average_params(const std::vector<ModelParams>& locals,
                           const std::vector<PartitionSlice>& slices) {
    std::size_t total = 0;
    for (const PartitionSlice& s : slices) total += s.count;
    const std::size_t d = locals[0].weights.size();
    ModelParams avg = ModelParams::zeros(d);
    for (std::size_t i = 0; i < locals.size(); ++i) {
        double w = static_cast<double>(slices[i].count) / static_cast<double>(total);
        for (std::size_t j = 0; j < d; ++j) avg.weights[j] += w * locals[i].weights[j];
        avg.bias += w * locals[i].bias;
    }
    return avg;
}

TrainResult train_distributed_core(std::vector<LabeledExample> examples, const Hyperparams& hp,
                                   const ClusterConfig& cluster, const NetworkModel& net,
                                   const TrainOptions& opts, WorkerPool& pool, PhaseReport pr) {
    const std::size_t k = cluster.worker_count;
    const std::size_t d = examples[0].features.size();

    TrainResult result;
    auto [train, val] = split(std::move(examples), hp.train_fraction, hp.shuffle_seed);
    result.train_examples = train.size();
    result.validation_examples = val.size();
    require(k <= train.size(), "train_distributed: more workers than training examples");
    require(!val.empty(), "train_distributed: validation split is empty");

    const std::uint64_t example_bytes =
        net.record_bytes != 0 ? net.record_bytes : (d + 1) * net.float_bytes;
    const std::uint64_t model_bytes = (d + 1) * net.float_bytes;

    // Data distribution: the master streams each worker its slice; the hub
    // link serializes the transfers, so phase time is the sum of records.
    std::vector<PartitionSlice> slices = partition(train, k);
    for (const PartitionSlice& s : slices) {
        std::uint64_t bytes = static_cast<std::uint64_t>(s.count) * example_bytes;
        pr.add_transfer(
            {Phase::DataDistribution, 0, static_cast<int>(s.worker_id + 1), bytes,
             simulate_transfer(bytes, net)});
    }

    ModelParams params = ModelParams::zeros(d);
    std::vector<double> worker_cpu(k, 0.0);
    double master_cpu = 0.0;
    PhaseStat& tstat = pr.at(Phase::Train);

    if (cluster.sync_mode == SyncMode::Synchronous) {
        // Lockstep replay of the single-node schedule: same shuffle per
        // epoch, same batch boundaries; each batch is sliced across workers
        // and the weighted aggregate equals the pooled batch gradient.
        std::vector<GradientVector> grads(k);
        for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
            StopWatch wall;
            SplitMix64 g(mix_seed(hp.shuffle_seed, epoch));
            deterministic_shuffle(train, g);
            for (std::size_t off = 0; off < train.size(); off += hp.batch_size) {
                const std::size_t m = std::min(hp.batch_size, train.size() - off);
                pool.run([&](std::size_t wid) {
                    double cpu0 = thread_cpu_seconds();
                    Share s = share_of(m, k, wid);
                    if (s.count > 0) {
                        grads[wid] = worker_gradient(
                            params,
                            std::span<const LabeledExample>(train.data() + off + s.begin, s.count),
                            hp.l2);
                    } else {
                        grads[wid] = zero_gradient(d);
                    }
                    worker_cpu[wid] += thread_cpu_seconds() - cpu0;
                });
                double cpu0 = thread_cpu_seconds();
                GradientVector agg = aggregate(grads);
                sgd_step(params, agg, hp.learning_rate);
                master_cpu += thread_cpu_seconds() - cpu0;
                ++pr.steps;
                pr.sync_message_units += static_cast<std::uint64_t>(k) * hp.batch_size;
                record_sync_event(pr, k, model_bytes, net);
            }
            tstat.wall_seconds += wall.seconds();
            if (opts.record_epoch_loss) {
                std::vector<double> partial(k, 0.0);
                pool.run([&](std::size_t wid) {
                    Share s = share_of(train.size(), k, wid);
                    partial[wid] =
                        s.count == 0
                            ? 0.0
                            : batch_loss(params,
                                         std::span<const LabeledExample>(train.data() + s.begin,
                                                                         s.count),
                                         0.0) *
                                  static_cast<double>(s.count);
                });
                double sum = 0.0;
                for (double p : partial) sum += p;
                double loss = sum / static_cast<double>(train.size());
                if (hp.l2 > 0.0) {
                    double wsq = 0.0;
                    for (double w : params.weights) wsq += w * w;
                    loss += 0.5 * hp.l2 * wsq;
                }
                result.epoch_losses.push_back(loss);
            }
        }
    } else {
        // Local epochs: each worker trains on its fixed partition for a full
        // epoch, then parameters are averaged weighted by partition size.
        // One synchronization event per epoch; no single-node equivalence.
        std::vector<ModelParams> locals(k);
        for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
            StopWatch wall;
            pool.run([&](std::size_t wid) {
                double cpu0 = thread_cpu_seconds();
                const PartitionSlice& s = slices[wid];
                SplitMix64 g(mix_seed(mix_seed(hp.shuffle_seed, epoch), wid + 1));
                shuffle_range(train, s.begin, s.count, g);
                ModelParams local = params;
                for (std::size_t off = 0; off < s.count; off += hp.batch_size) {
                    std::size_t m = std::min(hp.batch_size, s.count - off);
                    GradientVector grad = worker_gradient(
                        local, std::span<const LabeledExample>(train.data() + s.begin + off, m),
                        hp.l2);
                    sgd_step(local, grad, hp.learning_rate);
                }
                locals[wid] = std::move(local);
                worker_cpu[wid] += thread_cpu_seconds() - cpu0;
            });
            double cpu0 = thread_cpu_seconds();
            params = average_params(locals, slices);
            master_cpu += thread_cpu_seconds() - cpu0;
            ++pr.steps;
            pr.sync_message_units += static_cast<std::uint64_t>(k) * hp.batch_size;
            record_sync_event(pr, k, model_bytes, net);
            tstat.wall_seconds += wall.seconds();
            if (opts.record_epoch_loss) {
                result.epoch_losses.push_back(batch_loss(params, train, hp.l2));
            }
        }
    }
    tstat.sim_seconds = *std::max_element(worker_cpu.begin(), worker_cpu.end()) + master_cpu;

    // Parallel evaluation; integer counts merge in worker order, so the
    // result is schedule-independent.
    {
        StopWatch wall;
        std::vector<Metrics> partial(k);
        std::vector<double> eval_cpu(k, 0.0);
        pool.run([&](std::size_t wid) {
            double cpu0 = thread_cpu_seconds();
            Share s = share_of(val.size(), k, wid);
            if (s.count > 0) {
                partial[wid] =
                    evaluate(params, std::span<const LabeledExample>(val.data() + s.begin, s.count));
            }
            eval_cpu[wid] += thread_cpu_seconds() - cpu0;
        });
        Metrics merged;
        for (const Metrics& p : partial) {
            merged.correct += p.correct;
            merged.total += p.total;
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) merged.confusion[a][b] += p.confusion[a][b];
            }
        }
        merged.accuracy = static_cast<double>(merged.correct) / static_cast<double>(merged.total);
        result.metrics = merged;
        PhaseStat& estat = pr.at(Phase::Evaluate);
        estat.wall_seconds = wall.seconds();
        estat.sim_seconds = *std::max_element(eval_cpu.begin(), eval_cpu.end());
    }

    // Result collection: one metrics message per worker.
    for (std::size_t i = 0; i < k; ++i) {
        pr.add_transfer({Phase::ResultCollection, static_cast<int>(i + 1), 0, kMetricsRecordBytes,
                         simulate_transfer(kMetricsRecordBytes, net)});
    }
    pr.result_message_units = k;

    result.params = std::move(params);
    result.phases = std::move(pr);
    return result;
}

}  // namespace

TrainResult train_distributed_examples(std::vector<LabeledExample> examples, const Hyperparams& hp,
                                       const ClusterConfig& cluster, const NetworkModel& net,
                                       const TrainOptions& opts) {
    hp.validate();
    cluster.validate();
    net.validate();
    require(!examples.empty(), "train_distributed: no examples");

    WorkerPool pool(cluster.worker_count);
    PhaseReport pr;
    pr.peak_concurrent_tasks = static_cast<int>(cluster.worker_count);
    return train_distributed_core(std::move(examples), hp, cluster, net, opts, pool, std::move(pr));
}

TrainResult train_distributed(std::span<const Document> docs, const Hyperparams& hp,
                              const ClusterConfig& cluster, const NetworkModel& net,
                              const EmbedderConfig& embedder, const TrainOptions& opts) {
    hp.validate();
    cluster.validate();
    net.validate();
    embedder.validate();
    require(!docs.empty(), "train_distributed: no documents");

    const std::size_t k = cluster.worker_count;
    WorkerPool pool(k);
    PhaseReport pr;
    pr.peak_concurrent_tasks = static_cast<int>(k);

    std::vector<TokenList> tokens(docs.size());
    {
        StopWatch wall;
        std::vector<double> cpu(k, 0.0);
        pool.run([&](std::size_t wid) {
            double cpu0 = thread_cpu_seconds();
            Share s = share_of(docs.size(), k, wid);
            for (std::size_t i = s.begin; i < s.begin + s.count; ++i) {
                tokens[i] = preprocess(docs[i].raw_text);
            }
            cpu[wid] += thread_cpu_seconds() - cpu0;
        });
        PhaseStat& stat = pr.at(Phase::Preprocess);
        stat.wall_seconds = wall.seconds();
        stat.sim_seconds = *std::max_element(cpu.begin(), cpu.end());
    }

    std::vector<LabeledExample> examples(docs.size());
    {
        StopWatch wall;
        std::vector<double> cpu(k, 0.0);
        pool.run([&](std::size_t wid) {
            double cpu0 = thread_cpu_seconds();
            Share s = share_of(docs.size(), k, wid);
            for (std::size_t i = s.begin; i < s.begin + s.count; ++i) {
                examples[i].features = embed(tokens[i], embedder);
                examples[i].label = docs[i].label == Sentiment::Positive ? 1 : 0;
            }
            cpu[wid] += thread_cpu_seconds() - cpu0;
        });
        PhaseStat& stat = pr.at(Phase::Embedding);
        stat.wall_seconds = wall.seconds();
        stat.sim_seconds = *std::max_element(cpu.begin(), cpu.end());
    }
    tokens.clear();
    tokens.shrink_to_fit();

    return train_distributed_core(std::move(examples), hp, cluster, net, opts, pool, std::move(pr));
}

}  // namespace sentdist
