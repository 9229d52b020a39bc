#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "sentdist/model.hpp"
#include "sentdist/phase.hpp"
#include "sentdist/types.hpp"

namespace sentdist {

enum class SyncMode {
    // Lockstep mini-batch SGD: every global batch is split across workers,
    // gradients are aggregated each step. Mathematically identical to the
    // single-node run on the same seed.
    Synchronous,
    // Each worker runs a full local epoch on its partition, parameters are
    // averaged at epoch boundaries. Cheaper on sync, no equivalence claim.
    LocalEpochs,
};

struct ClusterConfig {
    std::size_t worker_count = 4;
    int cores_per_worker = 4;
    double ram_gb_per_worker = 8.0;
    int master_cores = 8;
    double master_ram_gb = 16.0;
    SyncMode sync_mode = SyncMode::Synchronous;

    void validate() const;
};

struct NetworkModel {
    double bandwidth_gbps = 10.0;
    double latency_us = 50.0;
    // Bytes per example record moved during data distribution.
    // 0 means derive from the embedding: (dimension+1) * float_bytes.
    std::uint64_t record_bytes = 0;
    std::uint64_t float_bytes = 8;

    void validate() const;
};

// Modeled one-way transfer time: latency + bits / bandwidth.
double simulate_transfer(std::uint64_t bytes, const NetworkModel& net);

// Contiguous slice of the training set owned by one worker.
struct PartitionSlice {
    std::size_t worker_id = 0;  // 0-based
    std::size_t begin = 0;
    std::size_t count = 0;
};

// Balanced sizes: first n%k workers get one extra row. Requires 1 <= k <= n.
std::vector<std::size_t> partition_sizes(std::size_t n, std::size_t k);

std::vector<PartitionSlice> partition(std::span<const LabeledExample> train_set, std::size_t k);

// Gradient over one worker's share of a batch.
GradientVector worker_gradient(const ModelParams& params, std::span<const LabeledExample> slice,
                               double l2);

// Example-count-weighted mean of per-worker gradients, folded in ascending
// worker order so the floating-point result is schedule-independent.
// Zero-count entries are barrier participants with no data; they are skipped.
GradientVector aggregate(std::span<const GradientVector> grads);

// Persistent worker threads with a run/barrier cycle. run() executes
// task(worker_id) on every worker and returns when all have finished; the
// first exception a task throws is rethrown from run() after the barrier.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t worker_count);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void run(const std::function<void(std::size_t)>& task);
    std::size_t size() const { return threads_.size(); }

private:
    void worker_loop(std::size_t worker_id);

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    const std::function<void(std::size_t)>* task_ = nullptr;
    std::exception_ptr first_error_;
    std::uint64_t generation_ = 0;
    std::size_t remaining_ = 0;
    bool stop_ = false;
};

// Simulated k-worker cluster training over a star network with the master
// at the hub. Emits TransferRecords for data distribution, every model
// synchronization and the final result collection.
TrainResult train_distributed(std::span<const Document> docs, const Hyperparams& hp,
                              const ClusterConfig& cluster, const NetworkModel& net,
                              const EmbedderConfig& embedder, const TrainOptions& opts = {});

TrainResult train_distributed_examples(std::vector<LabeledExample> examples, const Hyperparams& hp,
                                       const ClusterConfig& cluster, const NetworkModel& net,
                                       const TrainOptions& opts = {});

}  // namespace sentdist
