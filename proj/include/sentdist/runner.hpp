#pragma once

#include <optional>
#include <span>
#include <string>

#include "sentdist/config.hpp"
#include "sentdist/report.hpp"

namespace sentdist {

enum class RunKind { Single, Distributed, Both, CostOnly };

// "single" | "distributed" | "both" | "cost-only"; anything else is a ConfigError.
RunKind parse_run_kind(const std::string& text);

struct ExperimentOutcome {
    std::optional<RunReport> single_run;
    std::optional<RunReport> distributed_run;
    std::optional<Comparison> comparison;
    std::optional<CostInputs> cost_inputs;  // calibrated (both) or configured (cost-only)
    std::optional<CostEstimate> cost_single;
    std::optional<CostEstimate> cost_distributed;
    // Full human-readable summary: run tables, comparison, bandwidth, cost.
    std::string summary;
    // Machine-dependent timing block (stdout + optional sidecar only).
    std::string timings_json;
};

// Loads data per cfg.data, executes the requested runs and builds the
// summary. Does not touch the filesystem for output; see write_outputs.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, RunKind kind);

// Writes canonical report files into cfg.output.directory: single.json /
// distributed.json / comparison.json / cost.json depending on what ran,
// plus optional timings.json and transfers.csv sidecars. Creates the
// directory. Nothing is written before this call, so a failed run leaves
// no partial reports.
void write_outputs(const ExperimentOutcome& outcome, const ExperimentConfig& cfg);

// Distributed run per k, one CSV row each:
// "k,wall_seconds,sim_seconds,predicted_seconds,accuracy". Predictions come
// from unit costs calibrated on the k=1 run (run implicitly when 1 is not
// in ks). Rows are buffered and written at the end.
void run_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> ks,
               const std::filesystem::path& csv_path);

}  // namespace sentdist
