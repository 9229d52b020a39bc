#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentdist/costmodel.hpp"
#include "sentdist/ingest.hpp"
#include "sentdist/model.hpp"
#include "sentdist/phase.hpp"

namespace sentdist {

// Report file contents never include wall-clock or CPU-derived numbers:
// identical config + seed must produce byte-identical files. Timings go to
// stdout and the optional timings sidecar instead.

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ReportMode { SingleNode, Distributed };

struct RunReport {
    ReportMode mode = ReportMode::SingleNode;
    std::size_t workers = 1;
    std::size_t dimension = 0;
    std::uint64_t train_examples = 0;
    std::uint64_t validation_examples = 0;
    IngestCounts ingest;
    Metrics metrics;
    PhaseReport phases;
    // Hex digest of the resolved config; ties a report to its inputs.
    std::string config_fingerprint;
    // Hex digest of the final parameter bytes; cheap equivalence witness.
    std::string params_checksum;
};

struct ComparisonRow {
    std::string name;
    double single_value = 0.0;
    double distributed_value = 0.0;
    // Positive means the distributed run improved on the single run.
    double improvement_pct = 0.0;
    // Machine-dependent rows are printed but kept out of canonical files.
    bool machine_dependent = false;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::string single_fingerprint;
    std::string distributed_fingerprint;

    const ComparisonRow* find(const std::string& name) const;
};

// Builds time and accuracy rows from two finished runs. Throws ReportError
// naming the field if either side lacks a processing time or an accuracy.
Comparison compare(const RunReport& single_run, const RunReport& distributed_run);

struct BandwidthRow {
    Phase phase = Phase::DataDistribution;
    std::uint64_t bytes = 0;
    double sim_seconds = 0.0;
    double avg_gbps = 0.0;
    double peak_gbps = 0.0;  // best single-record rate in the phase
};

// Per-phase achieved bandwidth over the simulated transfers, in phase order.
std::vector<BandwidthRow> bandwidth_table(std::span<const TransferRecord> transfers);

// Canonical JSON: keys sorted, floats as shortest round-trip decimal text,
// LF line ending at end of document. Byte-identical for identical content.
void write_run_report(const std::filesystem::path& path, const RunReport& report);
RunReport read_run_report(const std::filesystem::path& path);

void write_comparison(const std::filesystem::path& path, const Comparison& comparison);
Comparison read_comparison(const std::filesystem::path& path);

void write_cost_report(const std::filesystem::path& path, const CostInputs& inputs,
                       const CostEstimate& single_estimate, const CostEstimate& distributed_estimate);

// Human-readable tables for stdout.
std::string render_comparison(const Comparison& comparison);
std::string render_bandwidth(std::span<const BandwidthRow> rows);
std::string render_run_summary(const RunReport& report);
std::string render_cost(const CostInputs& inputs, const CostEstimate& single_estimate,
                        const CostEstimate& distributed_estimate);

}  // namespace sentdist
