#include "sentdist/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sentdist/text.hpp"

namespace sentdist {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line) {
    throw ConfigError("invalid value for " + key + ": '" + value + "'", line);
}

double to_double(const std::string& key, const std::string& value, int line) {
    double out = 0.0;
    if (!parse_double(value, out)) bad_value(key, value, line);
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value, int line) {
    std::uint64_t out = 0;
    if (!parse_u64(value, out)) bad_value(key, value, line);
    return out;
}

bool to_bool(const std::string& key, const std::string& value, int line) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value, line);
}

std::vector<int> to_int_list(const std::string& key, const std::string& value, int line) {
    std::vector<int> out;
    std::string_view rest(value);
    while (!rest.empty()) {
        std::size_t comma = rest.find(',');
        std::string_view piece = trim(rest.substr(0, comma));
        std::uint64_t v = 0;
        if (!parse_u64(piece, v) || v == 0 || v > 16) bad_value(key, value, line);
        out.push_back(static_cast<int>(v));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (out.empty()) bad_value(key, value, line);
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"data.input",
         [](ExperimentConfig& c, const std::string& v, int) { c.data.input = v; }},
        {"data.embeddings_file",
         [](ExperimentConfig& c, const std::string& v, int) {
             if (v.empty()) c.data.embeddings_file.reset();
             else c.data.embeddings_file = v;
         }},
        {"data.subsample",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.data.subsample = to_u64("data.subsample", v, l);
         }},
        {"data.label_column",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.data.schema.label_column = to_u64("data.label_column", v, l);
         }},
        {"data.text_column",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.data.schema.text_column = to_u64("data.text_column", v, l);
         }},
        {"data.delimiter",
         [](ExperimentConfig& c, const std::string& v, int l) {
             if (v.size() != 1) bad_value("data.delimiter", v, l);
             c.data.schema.delimiter = v[0];
         }},
        {"data.negative_value",
         [](ExperimentConfig& c, const std::string& v, int) { c.data.schema.negative_value = v; }},
        {"data.positive_value",
         [](ExperimentConfig& c, const std::string& v, int) { c.data.schema.positive_value = v; }},
        {"data.neutral_value",
         [](ExperimentConfig& c, const std::string& v, int) { c.data.schema.neutral_value = v; }},
        {"data.encoding",
         [](ExperimentConfig& c, const std::string& v, int l) {
             if (v != "utf8-lossy" && v != "latin1") bad_value("data.encoding", v, l);
             c.data.schema.encoding = v;
         }},
        {"embedder.dimension",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.embedder.dimension = to_u64("embedder.dimension", v, l);
         }},
        {"embedder.ngram_orders",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.embedder.ngram_orders = to_int_list("embedder.ngram_orders", v, l);
         }},
        {"embedder.hash_seed",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.embedder.hash_seed = to_u64("embedder.hash_seed", v, l);
         }},
        {"train.learning_rate",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.train.learning_rate = to_double("train.learning_rate", v, l);
         }},
        {"train.batch_size",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.train.batch_size = to_u64("train.batch_size", v, l);
         }},
        {"train.epochs",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.train.epochs = to_u64("train.epochs", v, l);
         }},
        {"train.train_fraction",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.train.train_fraction = to_double("train.train_fraction", v, l);
         }},
        {"train.l2",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.train.l2 = to_double("train.l2", v, l);
         }},
        {"train.shuffle_seed",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.train.shuffle_seed = to_u64("train.shuffle_seed", v, l);
         }},
        {"cluster.workers",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cluster.worker_count = to_u64("cluster.workers", v, l);
         }},
        {"cluster.cores_per_worker",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cluster.cores_per_worker = static_cast<int>(to_u64("cluster.cores_per_worker", v, l));
         }},
        {"cluster.ram_gb_per_worker",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cluster.ram_gb_per_worker = to_double("cluster.ram_gb_per_worker", v, l);
         }},
        {"cluster.master_cores",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cluster.master_cores = static_cast<int>(to_u64("cluster.master_cores", v, l));
         }},
        {"cluster.master_ram_gb",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cluster.master_ram_gb = to_double("cluster.master_ram_gb", v, l);
         }},
        {"cluster.sync_mode",
         [](ExperimentConfig& c, const std::string& v, int l) {
             if (v == "synchronous") c.cluster.sync_mode = SyncMode::Synchronous;
             else if (v == "local-epochs") c.cluster.sync_mode = SyncMode::LocalEpochs;
             else bad_value("cluster.sync_mode", v, l);
         }},
        {"network.bandwidth_gbps",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.network.bandwidth_gbps = to_double("network.bandwidth_gbps", v, l);
         }},
        {"network.latency_us",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.network.latency_us = to_double("network.latency_us", v, l);
         }},
        {"network.record_bytes",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.network.record_bytes = to_u64("network.record_bytes", v, l);
         }},
        {"network.float_bytes",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.network.float_bytes = to_u64("network.float_bytes", v, l);
         }},
        {"cost.n",
         [](ExperimentConfig& c, const std::string& v, int l) { c.cost.n = to_u64("cost.n", v, l); }},
        {"cost.d",
         [](ExperimentConfig& c, const std::string& v, int l) { c.cost.d = to_u64("cost.d", v, l); }},
        {"cost.k",
         [](ExperimentConfig& c, const std::string& v, int l) { c.cost.k = to_u64("cost.k", v, l); }},
        {"cost.batch",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.batch = to_u64("cost.batch", v, l);
         }},
        {"cost.iterations",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.iterations = to_u64("cost.iterations", v, l);
         }},
        {"cost.c_pre",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.c_pre = to_double("cost.c_pre", v, l);
         }},
        {"cost.c_emb",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.c_emb = to_double("cost.c_emb", v, l);
         }},
        {"cost.c_fwd",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.c_fwd = to_double("cost.c_fwd", v, l);
         }},
        {"cost.c_bwd",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.c_bwd = to_double("cost.c_bwd", v, l);
         }},
        {"cost.c_upd",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.c_upd = to_double("cost.c_upd", v, l);
         }},
        {"cost.c_net",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.cost.c_net = to_double("cost.c_net", v, l);
         }},
        {"output.directory",
         [](ExperimentConfig& c, const std::string& v, int) { c.output.directory = v; }},
        {"output.emit_timings",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.output.emit_timings = to_bool("output.emit_timings", v, l);
         }},
        {"output.export_transfers",
         [](ExperimentConfig& c, const std::string& v, int l) {
             c.output.export_transfers = to_bool("output.export_transfers", v, l);
         }},
    };
    return table;
}

void apply_key(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value,
               int line) {
    auto it = setters().find(dotted_key);
    if (it == setters().end()) {
        throw ConfigError("unknown config key: " + dotted_key, line);
    }
    it->second(cfg, value, line);
}

}  // namespace

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.data.input = "data/synthetic_tweets.csv";
    // Cost-only defaults describe a full-scale corpus on four workers,
    // ten epochs at batch 4096 (391 steps per epoch). Unit costs are
    // illustrative; calibrate against a measured run for host-specific
    // numbers. c_net is the star-topology pair cost implied by the default
    // network (2 * (latency + (d+1)*8 bytes / bandwidth)).
    cfg.cost.n = 1600000;
    cfg.cost.d = 768;
    cfg.cost.k = 4;
    cfg.cost.batch = 4096;
    cfg.cost.iterations = 3910;
    cfg.cost.c_pre = 2e-08;
    cfg.cost.c_emb = 1.2e-09;
    cfg.cost.c_fwd = 8e-10;
    cfg.cost.c_bwd = 1.6e-09;
    cfg.cost.c_upd = 1e-09;
    cfg.cost.c_net = 1.1e-04;
    cfg.cost.net = cfg.network;
    return cfg;
}

void ExperimentConfig::validate() const {
    embedder.validate();
    train.validate();
    cluster.validate();
    network.validate();
    cost.validate();
    if (data.input.empty() && !data.embeddings_file) {
        throw ConfigError("data.input is not set");
    }
}

std::string ExperimentConfig::describe() const {
    std::ostringstream out;
    out << "data.input=" << data.input.string() << '\n';
    out << "data.embeddings_file=" << (data.embeddings_file ? data.embeddings_file->string() : "")
        << '\n';
    out << "data.subsample=" << data.subsample << '\n';
    out << "data.label_column=" << data.schema.label_column << '\n';
    out << "data.text_column=" << data.schema.text_column << '\n';
    out << "data.delimiter=" << data.schema.delimiter << '\n';
    out << "data.negative_value=" << data.schema.negative_value << '\n';
    out << "data.positive_value=" << data.schema.positive_value << '\n';
    out << "data.neutral_value=" << data.schema.neutral_value << '\n';
    out << "data.encoding=" << data.schema.encoding << '\n';
    out << "embedder.dimension=" << embedder.dimension << '\n';
    out << "embedder.ngram_orders=";
    for (std::size_t i = 0; i < embedder.ngram_orders.size(); ++i) {
        if (i) out << ',';
        out << embedder.ngram_orders[i];
    }
    out << '\n';
    out << "embedder.hash_seed=" << embedder.hash_seed << '\n';
    out << "train.learning_rate=" << format_double(train.learning_rate) << '\n';
    out << "train.batch_size=" << train.batch_size << '\n';
    out << "train.epochs=" << train.epochs << '\n';
    out << "train.train_fraction=" << format_double(train.train_fraction) << '\n';
    out << "train.l2=" << format_double(train.l2) << '\n';
    out << "train.shuffle_seed=" << train.shuffle_seed << '\n';
    out << "cluster.workers=" << cluster.worker_count << '\n';
    out << "cluster.cores_per_worker=" << cluster.cores_per_worker << '\n';
    out << "cluster.ram_gb_per_worker=" << format_double(cluster.ram_gb_per_worker) << '\n';
    out << "cluster.master_cores=" << cluster.master_cores << '\n';
    out << "cluster.master_ram_gb=" << format_double(cluster.master_ram_gb) << '\n';
    out << "cluster.sync_mode="
        << (cluster.sync_mode == SyncMode::Synchronous ? "synchronous" : "local-epochs") << '\n';
    out << "network.bandwidth_gbps=" << format_double(network.bandwidth_gbps) << '\n';
    out << "network.latency_us=" << format_double(network.latency_us) << '\n';
    out << "network.record_bytes=" << network.record_bytes << '\n';
    out << "network.float_bytes=" << network.float_bytes << '\n';
    out << "cost.n=" << cost.n << '\n';
    out << "cost.d=" << cost.d << '\n';
    out << "cost.k=" << cost.k << '\n';
    out << "cost.batch=" << cost.batch << '\n';
    out << "cost.iterations=" << cost.iterations << '\n';
    out << "cost.c_pre=" << format_double(cost.c_pre) << '\n';
    out << "cost.c_emb=" << format_double(cost.c_emb) << '\n';
    out << "cost.c_fwd=" << format_double(cost.c_fwd) << '\n';
    out << "cost.c_bwd=" << format_double(cost.c_bwd) << '\n';
    out << "cost.c_upd=" << format_double(cost.c_upd) << '\n';
    out << "cost.c_net=" << format_double(cost.c_net) << '\n';
    out << "output.directory=" << output.directory.string() << '\n';
    out << "output.emit_timings=" << (output.emit_timings ? "true" : "false") << '\n';
    out << "output.export_transfers=" << (output.export_transfers ? "true" : "false") << '\n';
    return out.str();
}

std::string ExperimentConfig::fingerprint() const {
    // Output routing does not define the experiment: the same run written to a
    // different directory must keep the same fingerprint.
    std::istringstream text(describe());
    std::string filtered;
    std::string line;
    while (std::getline(text, line)) {
        if (line.rfind("output.", 0) == 0) continue;
        filtered += line;
        filtered += '\n';
    }
    return hex_digest(filtered);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());

    ExperimentConfig cfg = default_config();
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError("malformed section header", line_no);
            }
            section = std::string(trim(t.substr(1, t.size() - 2)));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected key = value", line_no);
        }
        std::string key(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (section.empty()) throw ConfigError("key outside any [section]", line_no);
        apply_key(cfg, section + "." + key, value, line_no);
    }
    // The cost model reuses the experiment's network settings unless a
    // record size was set explicitly.
    cfg.cost.net = cfg.network;
    return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value) {
    apply_key(cfg, dotted_key, value, 0);
    cfg.cost.net = cfg.network;
}

}  // namespace sentdist
