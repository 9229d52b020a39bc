#pragma once

// Run telemetry shared by the trainers, the cluster simulator, the cost
// model and the report writer.

#include <array>
#include <cstdint>
#include <vector>

#include "sentdist/types.hpp"

namespace sentdist {

enum class Phase : int {
    Preprocess = 0,
    Embedding,
    Train,
    Evaluate,
    DataDistribution,
    ModelSynchronization,
    ResultCollection,
};

inline constexpr int kPhaseCount = 7;

const char* phase_name(Phase p);
bool is_network_phase(Phase p);

// One simulated network transfer. Node 0 is the master; workers are 1..k.
struct TransferRecord {
    Phase phase = Phase::DataDistribution;
    int source = 0;
    int dest = 0;
    std::uint64_t bytes = 0;
    double sim_seconds = 0.0;
};

struct PhaseStat {
    // Real elapsed time on this host.
    double wall_seconds = 0.0;
    // Modeled time: for network phases, latency+bandwidth simulation; for
    // compute phases, the per-node time a dedicated k-node cluster would
    // take (max over workers of thread CPU time, plus serial master work).
    double sim_seconds = 0.0;
    std::uint64_t bytes = 0;
};

struct PhaseReport {
    std::array<PhaseStat, kPhaseCount> stats{};
    int peak_concurrent_tasks = 1;
    // Optimizer steps applied to the global model. In lockstep mode this is
    // the mini-batch count; in local-epochs mode, the number of averaging
    // events.
    std::uint64_t steps = 0;
    // Nominal message units exchanged during training syncs (k*batch per event).
    std::uint64_t sync_message_units = 0;
    // Messages in the final result collection (one per worker).
    std::uint64_t result_message_units = 0;
    std::vector<TransferRecord> transfers;

    PhaseStat& at(Phase p) { return stats[static_cast<int>(p)]; }
    const PhaseStat& at(Phase p) const { return stats[static_cast<int>(p)]; }

    // Appends the record and folds bytes/sim time into the phase totals.
    void add_transfer(const TransferRecord& r);

    std::uint64_t total_bytes() const;

    // Preprocess + embedding + train, the like-for-like comparison quantity.
    double processing_wall_seconds() const;
    // Same phases on the modeled cluster clock, plus distribution and
    // synchronization network time. Evaluation and result collection are
    // reported but not part of the processing figure.
    double processing_sim_seconds() const;
};

// Writes "phase,source,dest,bytes,sim_seconds" rows.
void write_transfers_csv(const std::string& path, const std::vector<TransferRecord>& transfers);

}  // namespace sentdist
