#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sentdist/cluster.hpp"
#include "sentdist/costmodel.hpp"
#include "sentdist/ingest.hpp"
#include "sentdist/model.hpp"

namespace sentdist {

struct DataOptions {
    std::filesystem::path input;                           // labeled CSV corpus
    std::optional<std::filesystem::path> embeddings_file;  // skips preprocess+embed
    CsvSchema schema;
    std::uint64_t subsample = 0;  // keep first N documents; 0 keeps all
};

struct OutputOptions {
    std::filesystem::path directory = "out";
    bool emit_timings = false;     // machine-dependent timings sidecar
    bool export_transfers = false; // transfer log CSV per distributed run
};

struct ExperimentConfig {
    DataOptions data;
    EmbedderConfig embedder;
    Hyperparams train;
    ClusterConfig cluster;
    NetworkModel network;
    CostInputs cost;  // cost-only mode shape + unit costs
    OutputOptions output;

    void validate() const;
    // Stable text form of every resolved setting; input to the fingerprint.
    std::string describe() const;
    std::string fingerprint() const;
};

ExperimentConfig default_config();

// INI-style file: [section] headers, key = value lines, # or ; comments.
// Unknown sections/keys and unparseable values throw ConfigError with the
// 1-based line number.
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Applies one "section.key=value" override (CLI/API). Line number is 0.
void apply_override(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value);

}  // namespace sentdist
