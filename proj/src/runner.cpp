#include "sentdist/runner.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "sentdist/text.hpp"

namespace sentdist {

RunKind parse_run_kind(const std::string& text) {
    if (text == "single") return RunKind::Single;
    if (text == "distributed") return RunKind::Distributed;
    if (text == "both") return RunKind::Both;
    if (text == "cost-only") return RunKind::CostOnly;
    throw ConfigError("unknown mode: '" + text + "' (expected single|distributed|both|cost-only)");
}

namespace {

struct LoadedData {
    std::vector<Document> docs;
    std::vector<LabeledExample> examples;  // used instead of docs when set
    bool from_embeddings = false;
    IngestCounts counts;
};

LoadedData load_inputs(const ExperimentConfig& cfg) {
    LoadedData data;
    if (cfg.data.embeddings_file) {
        data.from_embeddings = true;
        data.examples = load_embeddings(*cfg.data.embeddings_file, cfg.embedder.dimension);
        if (data.examples.empty()) {
            throw DataError("embeddings file has no records: " + cfg.data.embeddings_file->string());
        }
        if (cfg.data.subsample > 0) {
            if (cfg.data.subsample > data.examples.size()) {
                throw DataError("data.subsample (" + std::to_string(cfg.data.subsample) +
                                ") exceeds the " + std::to_string(data.examples.size()) +
                                " available examples");
            }
            data.examples.resize(cfg.data.subsample);
        }
        data.counts.retained = data.examples.size();
    } else {
        data.docs = read_csv(cfg.data.input, cfg.data.schema, &data.counts);
        if (data.docs.empty()) {
            throw DataError("no usable documents in input: " + cfg.data.input.string());
        }
        if (cfg.data.subsample > 0) {
            if (cfg.data.subsample > data.docs.size()) {
                throw DataError("data.subsample (" + std::to_string(cfg.data.subsample) +
                                ") exceeds the " + std::to_string(data.docs.size()) +
                                " retained documents");
            }
            data.docs.resize(cfg.data.subsample);
        }
    }
    return data;
}

std::string params_digest(const ModelParams& p) {
    std::string bytes((p.weights.size() + 1) * sizeof(double), '\0');
    std::memcpy(bytes.data(), &p.bias, sizeof(double));
    if (!p.weights.empty()) {
        std::memcpy(bytes.data() + sizeof(double), p.weights.data(),
                    p.weights.size() * sizeof(double));
    }
    return hex_digest(bytes);
}

RunReport make_report(const ExperimentConfig& cfg, const TrainResult& tr, ReportMode mode,
                      std::size_t workers, const IngestCounts& counts) {
    RunReport r;
    r.mode = mode;
    r.workers = workers;
    r.dimension = tr.params.dimension();
    r.train_examples = tr.train_examples;
    r.validation_examples = tr.validation_examples;
    r.ingest = counts;
    r.metrics = tr.metrics;
    r.phases = tr.phases;
    r.config_fingerprint = cfg.fingerprint();
    r.params_checksum = params_digest(tr.params);
    return r;
}

// Synchronization cost per worker-step pair implied by the network model:
// one gradient up plus one parameter broadcast down.
double analytic_sync_pair_cost(std::size_t dimension, const NetworkModel& net) {
    std::uint64_t model_bytes = (static_cast<std::uint64_t>(dimension) + 1) * net.float_bytes;
    return 2.0 * simulate_transfer(model_bytes, net);
}

void append_phase_timings(std::ostringstream& out, const PhaseReport& pr) {
    out << '{';
    bool first = true;
    for (int i = 0; i < kPhaseCount; ++i) {
        auto p = static_cast<Phase>(i);
        const PhaseStat& s = pr.at(p);
        if (s.wall_seconds == 0.0 && s.sim_seconds == 0.0 && s.bytes == 0) continue;
        if (!first) out << ',';
        first = false;
        out << '"' << phase_name(p) << "\":{\"wall_seconds\":" << format_double(s.wall_seconds)
            << ",\"sim_seconds\":" << format_double(s.sim_seconds) << '}';
    }
    if (!first) out << ',';
    out << "\"processing_wall_seconds\":" << format_double(pr.processing_wall_seconds())
        << ",\"processing_sim_seconds\":" << format_double(pr.processing_sim_seconds()) << '}';
}

TrainResult run_one(const ExperimentConfig& cfg, const LoadedData& data, bool distributed,
                    std::size_t workers) {
    if (distributed) {
        ClusterConfig cluster = cfg.cluster;
        cluster.worker_count = workers;
        if (data.from_embeddings) {
            return train_distributed_examples(data.examples, cfg.train, cluster, cfg.network);
        }
        return train_distributed(data.docs, cfg.train, cluster, cfg.network, cfg.embedder);
    }
    if (data.from_embeddings) {
        return train_single_examples(data.examples, cfg.train);
    }
    return train_single(data.docs, cfg.train, cfg.embedder);
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, RunKind kind) {
    cfg.validate();
    ExperimentOutcome out;
    std::ostringstream summary;

    if (kind == RunKind::CostOnly) {
        CostInputs ci = cfg.cost;
        out.cost_inputs = ci;
        out.cost_single = estimate_train_single(ci);
        out.cost_distributed = estimate_train_distributed(ci);
        summary << render_cost(ci, *out.cost_single, *out.cost_distributed);
        summary << "communication units: train=" << comm_overhead(ci, CommPhase::Train)
                << " test=" << comm_overhead(ci, CommPhase::Test) << '\n';
        out.summary = summary.str();
        return out;
    }

    LoadedData data = load_inputs(cfg);

    if (kind == RunKind::Single || kind == RunKind::Both) {
        TrainResult tr = run_one(cfg, data, false, 1);
        out.single_run = make_report(cfg, tr, ReportMode::SingleNode, 1, data.counts);
        summary << render_run_summary(*out.single_run) << '\n';
    }
    if (kind == RunKind::Distributed || kind == RunKind::Both) {
        TrainResult tr = run_one(cfg, data, true, cfg.cluster.worker_count);
        out.distributed_run =
            make_report(cfg, tr, ReportMode::Distributed, cfg.cluster.worker_count, data.counts);
        summary << render_run_summary(*out.distributed_run) << '\n';
        summary << render_bandwidth(bandwidth_table(out.distributed_run->phases.transfers)) << '\n';
    }

    if (kind == RunKind::Both) {
        out.comparison = compare(*out.single_run, *out.distributed_run);
        summary << render_comparison(*out.comparison) << '\n';

        // Calibrate unit costs from the single run, then predict the
        // distributed configuration. The single run has no synchronization
        // phase to measure, so c_net comes from the network model directly.
        CostInputs shape;
        shape.n = out.single_run->train_examples;
        shape.d = out.single_run->dimension;
        shape.k = cfg.cluster.worker_count;
        shape.batch = cfg.train.batch_size;
        shape.iterations = out.single_run->phases.steps;
        shape.net = cfg.network;
        CostInputs calibrated = calibrate(out.single_run->phases, shape);
        calibrated.c_net = analytic_sync_pair_cost(out.single_run->dimension, cfg.network);
        out.cost_inputs = calibrated;
        out.cost_single = estimate_train_single(calibrated);
        out.cost_distributed = estimate_train_distributed(calibrated);
        summary << render_cost(calibrated, *out.cost_single, *out.cost_distributed);
        double simulated = out.distributed_run->phases.processing_sim_seconds();
        if (simulated > 0.0) {
            double predicted = out.cost_distributed->total;
            summary << "cost fidelity: predicted=" << format_fixed(predicted, 6)
                    << "s simulated=" << format_fixed(simulated, 6) << "s relative_error="
                    << format_fixed((predicted - simulated) / simulated * 100.0, 2) << "%\n";
        }
    }

    // Machine-dependent timing block, kept out of canonical reports.
    std::ostringstream timings;
    timings << "{\"schema\":\"sentdist.timings/1\"";
    if (out.single_run) {
        timings << ",\"single\":";
        append_phase_timings(timings, out.single_run->phases);
    }
    if (out.distributed_run) {
        timings << ",\"distributed\":";
        append_phase_timings(timings, out.distributed_run->phases);
    }
    if (out.cost_distributed && out.distributed_run) {
        double simulated = out.distributed_run->phases.processing_sim_seconds();
        timings << ",\"cost_fidelity\":{\"predicted_total_seconds\":"
                << format_double(out.cost_distributed->total)
                << ",\"simulated_total_seconds\":" << format_double(simulated) << '}';
    }
    timings << "}\n";
    out.timings_json = timings.str();

    out.summary = summary.str();
    return out;
}

void write_outputs(const ExperimentOutcome& outcome, const ExperimentConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output.directory, ec);
    if (ec) {
        throw IoError("cannot create output directory: " + cfg.output.directory.string() + ": " +
                      ec.message());
    }
    const std::filesystem::path& dir = cfg.output.directory;
    if (outcome.single_run) write_run_report(dir / "single.json", *outcome.single_run);
    if (outcome.distributed_run) {
        write_run_report(dir / "distributed.json", *outcome.distributed_run);
    }
    if (outcome.comparison) write_comparison(dir / "comparison.json", *outcome.comparison);
    if (outcome.cost_inputs && !outcome.single_run && !outcome.distributed_run) {
        write_cost_report(dir / "cost.json", *outcome.cost_inputs, *outcome.cost_single,
                          *outcome.cost_distributed);
    }
    if (cfg.output.emit_timings && !outcome.timings_json.empty()) {
        std::ofstream t(dir / "timings.json", std::ios::binary);
        if (!t) throw IoError("cannot open timings sidecar for writing");
        t << outcome.timings_json;
        if (!t.flush()) throw IoError("failed writing timings sidecar");
    }
    if (cfg.output.export_transfers && outcome.distributed_run) {
        write_transfers_csv((dir / "transfers.csv").string(),
                            outcome.distributed_run->phases.transfers);
    }
}

void run_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> ks,
               const std::filesystem::path& csv_path) {
    cfg.validate();
    if (ks.empty()) throw ConfigError("sweep requires at least one worker count");
    for (std::size_t k : ks) {
        if (k < 1 || k > 4096) throw ConfigError("sweep worker counts must be in [1, 4096]");
    }

    LoadedData data = load_inputs(cfg);

    struct Row {
        std::size_t k;
        double wall;
        double sim;
        double accuracy;
    };
    std::vector<Row> rows;
    rows.reserve(ks.size());

    // Unit costs come from a k=1 run: reuse the swept one when present.
    bool have_base = false;
    CostInputs calibrated;
    auto calibrate_from = [&](const TrainResult& tr) {
        CostInputs shape;
        shape.n = tr.train_examples;
        shape.d = tr.params.dimension();
        shape.k = 1;
        shape.batch = cfg.train.batch_size;
        shape.iterations = tr.phases.steps;
        shape.net = cfg.network;
        calibrated = calibrate(tr.phases, shape);
        have_base = true;
    };

    for (std::size_t k : ks) {
        TrainResult tr = run_one(cfg, data, true, k);
        rows.push_back({k, tr.phases.processing_wall_seconds(),
                        tr.phases.processing_sim_seconds(), tr.metrics.accuracy});
        if (k == 1 && !have_base) calibrate_from(tr);
    }
    if (!have_base) calibrate_from(run_one(cfg, data, true, 1));

    if (csv_path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(csv_path.parent_path(), ec);
        if (ec) throw IoError("cannot create sweep output directory: " + ec.message());
    }
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot open sweep output for writing: " + csv_path.string());
    out << "k,wall_seconds,sim_seconds,predicted_seconds,accuracy\n";
    for (const Row& r : rows) {
        CostInputs ci = calibrated;
        ci.k = r.k;
        double predicted = estimate_train_distributed(ci).total;
        out << r.k << ',' << format_double(r.wall) << ',' << format_double(r.sim) << ','
            << format_double(predicted) << ',' << format_double(r.accuracy) << '\n';
    }
    if (!out.flush()) throw IoError("failed writing sweep output: " + csv_path.string());
}

}  // namespace sentdist
