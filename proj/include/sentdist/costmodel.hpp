#pragma once

#include <cstdint>
#include <vector>

#include "sentdist/cluster.hpp"
#include "sentdist/phase.hpp"
#include "sentdist/types.hpp"

namespace sentdist {

// Inputs to the analytic cost model: workload shape plus per-operation unit
// costs in seconds. Unit costs are either supplied (what-if mode) or
// calibrated from a measured run.
struct CostInputs {
    std::uint64_t n = 0;           // training examples
    std::uint64_t d = 0;           // embedding dimension
    std::uint64_t k = 1;           // workers
    std::uint64_t batch = 32;      // examples per optimizer step
    std::uint64_t iterations = 0;  // optimizer steps (epochs * ceil(n/batch))

    double c_pre = 0.0;  // per document
    double c_emb = 0.0;  // per document-dimension
    double c_fwd = 0.0;  // per example-dimension
    double c_bwd = 0.0;  // per example-dimension
    double c_upd = 0.0;  // per parameter update
    double c_net = 0.0;  // per worker-step synchronization pair

    NetworkModel net;

    void validate() const;
};

struct CostEstimate {
    // Compute terms (per node for the distributed estimate).
    double preprocess = 0.0;
    double embedding = 0.0;
    double forward = 0.0;
    double backward = 0.0;
    double update = 0.0;
    // Network terms; zero for single-node estimates.
    double distribution = 0.0;  // per-node share: latency + (n/k)*record bits / bandwidth
    double sync = 0.0;          // c_net * k * log2(k) * iterations
    double total = 0.0;
    double predicted_speedup = 1.0;

    // Alternate readings reported alongside, not folded into total.
    double distribution_total = 0.0;  // serialized hub: k*latency + n*record bits / bandwidth
    double sync_star = 0.0;           // c_net * k * iterations (star simulator shape)

    double node_compute() const { return preprocess + embedding + forward + backward + update; }
};

// Single-node training time: c_pre*n + c_emb*n*d + (c_fwd+c_bwd)*d*iterations*batch
// + c_upd*d*iterations. The forward/backward terms are the per-epoch form
// c*n*d*epochs with epochs = iterations*batch/n, with n cancelled.
CostEstimate estimate_train_single(const CostInputs& ci);

// Distributed training time: distribution + single-node compute / k + sync.
CostEstimate estimate_train_distributed(const CostInputs& ci);

// Inference over n examples: no updates, no sync; distribution only when
// distributed.
CostEstimate estimate_test_single(const CostInputs& ci);
CostEstimate estimate_test_distributed(const CostInputs& ci);

enum class CommPhase { Train, Test };

// Message-unit count: Train -> k*batch*iterations, Test -> k.
std::uint64_t comm_overhead(const CostInputs& ci, CommPhase phase);

// Solves each unit cost from one measured run by dividing phase time by its
// operation count. Uses the modeled per-node (sim) times so the result is
// host-scheduling-independent. Zero time with a zero count gives zero cost;
// nonzero time with a zero count is unsolvable and throws DataError.
// c_fwd, c_bwd and c_upd share one train-phase measurement, so they are
// calibrated jointly under the convention c_fwd = c_bwd = c_upd.
CostInputs calibrate(const PhaseReport& measured, const CostInputs& shape);

// total(k) for k = 1..k_max with everything else fixed. Element i is k=i+1.
std::vector<double> predicted_totals(CostInputs ci, std::size_t k_max);

}  // namespace sentdist
