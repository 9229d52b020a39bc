#include "sentdist.h"

#include <map>
#include <memory>
#include <string>

#include "sentdist/config.hpp"
#include "sentdist/runner.hpp"

struct sd_config {
    sentdist::ExperimentConfig cfg = sentdist::default_config();
    std::string describe_buf;
};

struct sd_result {
    sentdist::ExperimentOutcome outcome;
    sentdist::ExperimentConfig cfg;
    std::map<std::string, double> values;
};

namespace {

thread_local std::string t_error;
thread_local int t_error_line = 0;

void clear_error() {
    t_error.clear();
    t_error_line = 0;
}

sd_status fail(sd_status st, const std::string& message, int line = 0) {
    t_error = message;
    t_error_line = line;
    return st;
}

// Maps core exceptions onto status codes; the boundary where C++ ends.
template <typename Fn>
sd_status guarded(Fn&& fn) {
    clear_error();
    try {
        fn();
        return SD_OK;
    } catch (const sentdist::ConfigError& e) {
        return fail(SD_ERR_CONFIG, e.what(), e.line());
    } catch (const sentdist::IoError& e) {
        return fail(SD_ERR_IO, e.what());
    } catch (const sentdist::DataError& e) {
        return fail(SD_ERR_DATA, e.what());
    } catch (const sentdist::ContractViolation& e) {
        return fail(SD_ERR_CONTRACT, e.what());
    } catch (const std::exception& e) {
        return fail(SD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SD_ERR_INTERNAL, "unknown error");
    }
}

void fill_values(sd_result& res) {
    auto& v = res.values;
    using sentdist::Phase;
    if (res.outcome.single_run) {
        const sentdist::RunReport& r = *res.outcome.single_run;
        v["single.accuracy"] = r.metrics.accuracy;
        v["single.steps"] = static_cast<double>(r.phases.steps);
        v["single.train_examples"] = static_cast<double>(r.train_examples);
        v["single.validation_examples"] = static_cast<double>(r.validation_examples);
        v["single.processing_wall_seconds"] = r.phases.processing_wall_seconds();
        v["single.processing_sim_seconds"] = r.phases.processing_sim_seconds();
    }
    if (res.outcome.distributed_run) {
        const sentdist::RunReport& r = *res.outcome.distributed_run;
        v["distributed.accuracy"] = r.metrics.accuracy;
        v["distributed.workers"] = static_cast<double>(r.workers);
        v["distributed.steps"] = static_cast<double>(r.phases.steps);
        v["distributed.sync_message_units"] = static_cast<double>(r.phases.sync_message_units);
        v["distributed.result_message_units"] = static_cast<double>(r.phases.result_message_units);
        v["distributed.sync_bytes"] =
            static_cast<double>(r.phases.at(Phase::ModelSynchronization).bytes);
        v["distributed.distribution_bytes"] =
            static_cast<double>(r.phases.at(Phase::DataDistribution).bytes);
        v["distributed.collection_bytes"] =
            static_cast<double>(r.phases.at(Phase::ResultCollection).bytes);
        v["distributed.total_bytes"] = static_cast<double>(r.phases.total_bytes());
        v["distributed.processing_wall_seconds"] = r.phases.processing_wall_seconds();
        v["distributed.processing_sim_seconds"] = r.phases.processing_sim_seconds();
    }
    if (res.outcome.comparison) {
        const sentdist::Comparison& c = *res.outcome.comparison;
        if (const auto* row = c.find("processing_time_seconds")) {
            v["comparison.time_reduction_pct"] = row->improvement_pct;
        }
        if (const auto* row = c.find("accuracy")) {
            v["comparison.accuracy_gain_pct"] = row->improvement_pct;
        }
        if (const auto* row = c.find("accuracy_points")) {
            v["comparison.accuracy_gain_points"] = row->improvement_pct;
        }
    }
    if (res.outcome.cost_single) v["cost.single_total"] = res.outcome.cost_single->total;
    if (res.outcome.cost_distributed) {
        v["cost.distributed_total"] = res.outcome.cost_distributed->total;
        v["cost.predicted_speedup"] = res.outcome.cost_distributed->predicted_speedup;
        v["cost.sync_seconds"] = res.outcome.cost_distributed->sync;
        v["cost.distribution_seconds"] = res.outcome.cost_distributed->distribution;
    }
    if (res.outcome.cost_inputs) {
        const sentdist::CostInputs& ci = *res.outcome.cost_inputs;
        v["cost.comm_train_units"] =
            static_cast<double>(comm_overhead(ci, sentdist::CommPhase::Train));
        v["cost.comm_test_units"] =
            static_cast<double>(comm_overhead(ci, sentdist::CommPhase::Test));
    }
}

}  // namespace

extern "C" {

const char* sd_version(void) { return "sentdist 1.0.0"; }

const char* sd_last_error(void) { return t_error.c_str(); }

int sd_last_error_line(void) { return t_error_line; }

sd_config* sd_config_create(void) {
    try {
        return new sd_config();
    } catch (...) {
        return nullptr;
    }
}

void sd_config_destroy(sd_config* cfg) { delete cfg; }

sd_status sd_config_load_file(sd_config* cfg, const char* path) {
    if (!cfg || !path) return fail(SD_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { cfg->cfg = sentdist::parse_config_file(path); });
}

sd_status sd_config_set(sd_config* cfg, const char* dotted_key, const char* value) {
    if (!cfg || !dotted_key || !value) return fail(SD_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { sentdist::apply_override(cfg->cfg, dotted_key, value); });
}

sd_status sd_config_validate(const sd_config* cfg) {
    if (!cfg) return fail(SD_ERR_INVALID_ARGUMENT, "null config");
    return guarded([&] { cfg->cfg.validate(); });
}

const char* sd_config_describe(sd_config* cfg) {
    if (!cfg) return "";
    cfg->describe_buf = cfg->cfg.describe();
    return cfg->describe_buf.c_str();
}

sd_status sd_run(sd_config* cfg, const char* mode, sd_result** out) {
    if (!cfg || !mode || !out) return fail(SD_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        sentdist::RunKind kind = sentdist::parse_run_kind(mode);
        auto res = std::make_unique<sd_result>();
        res->cfg = cfg->cfg;
        res->outcome = sentdist::run_experiment(cfg->cfg, kind);
        fill_values(*res);
        *out = res.release();
    });
}

sd_status sd_sweep(sd_config* cfg, const size_t* worker_counts, size_t count,
                   const char* csv_path) {
    if (!cfg || !worker_counts || count == 0 || !csv_path) {
        return fail(SD_ERR_INVALID_ARGUMENT, "null argument or empty worker list");
    }
    return guarded([&] {
        std::span<const std::size_t> ks(worker_counts, count);
        sentdist::run_sweep(cfg->cfg, ks, csv_path);
    });
}

sd_status sd_result_write(const sd_result* res, const char* out_dir) {
    if (!res) return fail(SD_ERR_INVALID_ARGUMENT, "null result");
    return guarded([&] {
        sentdist::ExperimentConfig cfg = res->cfg;
        if (out_dir && *out_dir) cfg.output.directory = out_dir;
        sentdist::write_outputs(res->outcome, cfg);
    });
}

const char* sd_result_summary(const sd_result* res) {
    return res ? res->outcome.summary.c_str() : "";
}

sd_status sd_result_value(const sd_result* res, const char* key, double* out) {
    if (!res || !key || !out) return fail(SD_ERR_INVALID_ARGUMENT, "null argument");
    clear_error();
    auto it = res->values.find(key);
    if (it == res->values.end()) {
        return fail(SD_ERR_INVALID_ARGUMENT, std::string("unknown result key: ") + key);
    }
    *out = it->second;
    return SD_OK;
}

void sd_result_destroy(sd_result* res) { delete res; }

}  // extern "C"
