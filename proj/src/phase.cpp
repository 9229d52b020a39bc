#include "sentdist/phase.hpp"

#include <fstream>

#include "sentdist/text.hpp"

namespace sentdist {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Preprocess: return "Preprocess";
        case Phase::Embedding: return "Embedding";
        case Phase::Train: return "Train";
        case Phase::Evaluate: return "Evaluate";
        case Phase::DataDistribution: return "DataDistribution";
        case Phase::ModelSynchronization: return "ModelSynchronization";
        case Phase::ResultCollection: return "ResultCollection";
    }
    return "Unknown";
}

bool is_network_phase(Phase p) {
    return p == Phase::DataDistribution || p == Phase::ModelSynchronization ||
           p == Phase::ResultCollection;
}

void PhaseReport::add_transfer(const TransferRecord& r) {
    transfers.push_back(r);
    PhaseStat& s = at(r.phase);
    s.bytes += r.bytes;
    s.sim_seconds += r.sim_seconds;
}

std::uint64_t PhaseReport::total_bytes() const {
    std::uint64_t sum = 0;
    for (const PhaseStat& s : stats) sum += s.bytes;
    return sum;
}

double PhaseReport::processing_wall_seconds() const {
    return at(Phase::Preprocess).wall_seconds + at(Phase::Embedding).wall_seconds +
           at(Phase::Train).wall_seconds;
}

double PhaseReport::processing_sim_seconds() const {
    return at(Phase::DataDistribution).sim_seconds + at(Phase::Preprocess).sim_seconds +
           at(Phase::Embedding).sim_seconds + at(Phase::Train).sim_seconds +
           at(Phase::ModelSynchronization).sim_seconds;
}

void write_transfers_csv(const std::string& path, const std::vector<TransferRecord>& transfers) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open transfer log for writing: " + path);
    out << "phase,source,dest,bytes,sim_seconds\n";
    for (const TransferRecord& r : transfers) {
        out << phase_name(r.phase) << ',' << r.source << ',' << r.dest << ',' << r.bytes << ','
            << format_double(r.sim_seconds) << '\n';
    }
    if (!out.flush()) throw DataError("failed writing transfer log: " + path);
}

}  // namespace sentdist
