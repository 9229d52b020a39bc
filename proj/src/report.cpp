#include "sentdist/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sentdist/text.hpp"

namespace sentdist {

namespace {

using nlohmann::json;

// Canonical serialization: object keys in sorted order (json's object map
// already iterates sorted), floats as shortest round-trip text, integers in
// decimal, no whitespace. Output bytes depend only on content.
void dump_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                dump_canonical(json(it.key()), out);
                out.push_back(':');
                dump_canonical(it.value(), out);
            }
            out.push_back('}');
            break;
        }
        case json::value_t::array: {
            out.push_back('[');
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out.push_back(',');
                dump_canonical(j[i], out);
            }
            out.push_back(']');
            break;
        }
        case json::value_t::string: {
            out.push_back('"');
            for (unsigned char c : j.get_ref<const std::string&>()) {
                switch (c) {
                    case '"': out += "\\\""; break;
                    case '\\': out += "\\\\"; break;
                    case '\b': out += "\\b"; break;
                    case '\f': out += "\\f"; break;
                    case '\n': out += "\\n"; break;
                    case '\r': out += "\\r"; break;
                    case '\t': out += "\\t"; break;
                    default:
                        if (c < 0x20) {
                            static const char* kHex = "0123456789abcdef";
                            out += "\\u00";
                            out.push_back(kHex[(c >> 4) & 0xf]);
                            out.push_back(kHex[c & 0xf]);
                        } else {
                            out.push_back(static_cast<char>(c));
                        }
                }
            }
            out.push_back('"');
            break;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<std::int64_t>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<std::uint64_t>());
            break;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        default:
            out += "null";
    }
}

void write_canonical_file(const std::filesystem::path& path, const json& j) {
    std::string text;
    dump_canonical(j, text);
    text.push_back('\n');
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open report for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out.flush()) throw IoError("failed writing report: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("report is not valid JSON: " + path.string() + ": " + e.what());
    }
}

template <typename T>
T field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("report missing field: ") + key);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw DataError(std::string("report field has wrong type: ") + key);
    }
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

const ComparisonRow* Comparison::find(const std::string& name) const {
    for (const ComparisonRow& r : rows) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

Comparison compare(const RunReport& single_run, const RunReport& distributed_run) {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ReportError(std::string("comparison input missing: ") + what);
    };
    need(single_run.metrics.total > 0, "single-run accuracy");
    need(distributed_run.metrics.total > 0, "distributed-run accuracy");
    const double sw = single_run.phases.processing_wall_seconds();
    const double dw = distributed_run.phases.processing_wall_seconds();
    need(sw > 0.0, "single-run processing time");
    need(dw > 0.0, "distributed-run processing time");

    const double sa = single_run.metrics.accuracy;
    const double da = distributed_run.metrics.accuracy;
    const double ss = single_run.phases.processing_sim_seconds();
    const double ds = distributed_run.phases.processing_sim_seconds();

    Comparison c;
    c.rows.push_back({"processing_time_seconds", sw, dw, (sw - dw) / sw * 100.0, true});
    c.rows.push_back({"processing_time_simulated_seconds", ss, ds,
                      ss > 0.0 ? (ss - ds) / ss * 100.0 : 0.0, true});
    c.rows.push_back({"accuracy", sa, da, sa > 0.0 ? (da - sa) / sa * 100.0 : 0.0, false});
    // improvement_pct carries percentage points for this row.
    c.rows.push_back({"accuracy_points", sa, da, (da - sa) * 100.0, false});
    c.single_fingerprint = single_run.config_fingerprint;
    c.distributed_fingerprint = distributed_run.config_fingerprint;
    return c;
}

std::vector<BandwidthRow> bandwidth_table(std::span<const TransferRecord> transfers) {
    std::array<BandwidthRow, kPhaseCount> acc{};
    std::array<bool, kPhaseCount> seen{};
    for (const TransferRecord& r : transfers) {
        auto idx = static_cast<std::size_t>(r.phase);
        seen[idx] = true;
        acc[idx].phase = r.phase;
        acc[idx].bytes += r.bytes;
        acc[idx].sim_seconds += r.sim_seconds;
        if (r.sim_seconds > 0.0) {
            double rate = static_cast<double>(r.bytes) * 8.0 / (r.sim_seconds * 1e9);
            if (rate > acc[idx].peak_gbps) acc[idx].peak_gbps = rate;
        }
    }
    std::vector<BandwidthRow> rows;
    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        if (!seen[i]) continue;
        BandwidthRow row = acc[i];
        if (row.sim_seconds > 0.0) {
            row.avg_gbps = static_cast<double>(row.bytes) * 8.0 / (row.sim_seconds * 1e9);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_run_report(const std::filesystem::path& path, const RunReport& report) {
    json j;
    j["schema"] = "sentdist.run/1";
    j["mode"] = report.mode == ReportMode::SingleNode ? "single" : "distributed";
    j["workers"] = report.workers;
    j["dimension"] = report.dimension;
    j["train_examples"] = report.train_examples;
    j["validation_examples"] = report.validation_examples;
    j["ingest"] = {{"retained", report.ingest.retained},
                   {"dropped_neutral", report.ingest.dropped_neutral},
                   {"malformed", report.ingest.malformed}};
    j["metrics"] = {{"accuracy", report.metrics.accuracy},
                    {"correct", report.metrics.correct},
                    {"total", report.metrics.total},
                    {"confusion",
                     {{report.metrics.confusion[0][0], report.metrics.confusion[0][1]},
                      {report.metrics.confusion[1][0], report.metrics.confusion[1][1]}}}};
    j["counters"] = {{"steps", report.phases.steps},
                     {"sync_message_units", report.phases.sync_message_units},
                     {"result_message_units", report.phases.result_message_units},
                     {"total_bytes", report.phases.total_bytes()}};
    // Only network phases appear: their simulated time is a pure function of
    // bytes and the network model. Wall/CPU timings are machine-dependent
    // and stay out of canonical files.
    json phases = json::object();
    for (int i = 0; i < kPhaseCount; ++i) {
        auto p = static_cast<Phase>(i);
        if (!is_network_phase(p)) continue;
        const PhaseStat& s = report.phases.at(p);
        if (s.bytes == 0 && s.sim_seconds == 0.0) continue;
        phases[phase_name(p)] = {{"bytes", s.bytes}, {"sim_seconds", s.sim_seconds}};
    }
    j["phases"] = phases;
    j["config_fingerprint"] = report.config_fingerprint;
    j["params_checksum"] = report.params_checksum;
    write_canonical_file(path, j);
}

RunReport read_run_report(const std::filesystem::path& path) {
    json j = read_json_file(path);
    if (field<std::string>(j, "schema") != "sentdist.run/1") {
        throw DataError("unsupported run report schema: " + path.string());
    }
    RunReport r;
    std::string mode = field<std::string>(j, "mode");
    if (mode == "single") {
        r.mode = ReportMode::SingleNode;
    } else if (mode == "distributed") {
        r.mode = ReportMode::Distributed;
    } else {
        throw DataError("run report has unknown mode: " + mode);
    }
    r.workers = field<std::size_t>(j, "workers");
    r.dimension = field<std::size_t>(j, "dimension");
    r.train_examples = field<std::uint64_t>(j, "train_examples");
    r.validation_examples = field<std::uint64_t>(j, "validation_examples");
    json ingest = field<json>(j, "ingest");
    r.ingest.retained = field<std::uint64_t>(ingest, "retained");
    r.ingest.dropped_neutral = field<std::uint64_t>(ingest, "dropped_neutral");
    r.ingest.malformed = field<std::uint64_t>(ingest, "malformed");
    json metrics = field<json>(j, "metrics");
    r.metrics.accuracy = field<double>(metrics, "accuracy");
    r.metrics.correct = field<std::uint64_t>(metrics, "correct");
    r.metrics.total = field<std::uint64_t>(metrics, "total");
    json confusion = field<json>(metrics, "confusion");
    if (!confusion.is_array() || confusion.size() != 2) {
        throw DataError("run report confusion matrix malformed");
    }
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) r.metrics.confusion[a][b] = confusion[a][b];
    }
    json counters = field<json>(j, "counters");
    r.phases.steps = field<std::uint64_t>(counters, "steps");
    r.phases.sync_message_units = field<std::uint64_t>(counters, "sync_message_units");
    r.phases.result_message_units = field<std::uint64_t>(counters, "result_message_units");
    json phases = field<json>(j, "phases");
    for (auto it = phases.begin(); it != phases.end(); ++it) {
        bool known = false;
        for (int i = 0; i < kPhaseCount; ++i) {
            auto p = static_cast<Phase>(i);
            if (it.key() == phase_name(p)) {
                r.phases.at(p).bytes = field<std::uint64_t>(it.value(), "bytes");
                r.phases.at(p).sim_seconds = field<double>(it.value(), "sim_seconds");
                known = true;
                break;
            }
        }
        if (!known) throw DataError("run report has unknown phase: " + it.key());
    }
    r.config_fingerprint = field<std::string>(j, "config_fingerprint");
    r.params_checksum = field<std::string>(j, "params_checksum");
    return r;
}

void write_comparison(const std::filesystem::path& path, const Comparison& comparison) {
    json rows = json::array();
    for (const ComparisonRow& r : comparison.rows) {
        if (r.machine_dependent) continue;
        rows.push_back({{"name", r.name},
                        {"single", r.single_value},
                        {"distributed", r.distributed_value},
                        {"improvement_pct", r.improvement_pct}});
    }
    json j;
    j["schema"] = "sentdist.comparison/1";
    j["rows"] = rows;
    j["single_fingerprint"] = comparison.single_fingerprint;
    j["distributed_fingerprint"] = comparison.distributed_fingerprint;
    write_canonical_file(path, j);
}

Comparison read_comparison(const std::filesystem::path& path) {
    json j = read_json_file(path);
    if (field<std::string>(j, "schema") != "sentdist.comparison/1") {
        throw DataError("unsupported comparison schema: " + path.string());
    }
    Comparison c;
    for (const json& row : field<json>(j, "rows")) {
        ComparisonRow r;
        r.name = field<std::string>(row, "name");
        r.single_value = field<double>(row, "single");
        r.distributed_value = field<double>(row, "distributed");
        r.improvement_pct = field<double>(row, "improvement_pct");
        c.rows.push_back(std::move(r));
    }
    c.single_fingerprint = field<std::string>(j, "single_fingerprint");
    c.distributed_fingerprint = field<std::string>(j, "distributed_fingerprint");
    return c;
}

namespace {

json estimate_to_json(const CostEstimate& e) {
    return {{"preprocess", e.preprocess},
            {"embedding", e.embedding},
            {"forward", e.forward},
            {"backward", e.backward},
            {"update", e.update},
            {"distribution", e.distribution},
            {"distribution_total", e.distribution_total},
            {"sync", e.sync},
            {"sync_star", e.sync_star},
            {"total", e.total},
            {"predicted_speedup", e.predicted_speedup}};
}

}  // namespace

void write_cost_report(const std::filesystem::path& path, const CostInputs& inputs,
                       const CostEstimate& single_estimate,
                       const CostEstimate& distributed_estimate) {
    json j;
    j["schema"] = "sentdist.cost/1";
    j["inputs"] = {{"n", inputs.n},           {"d", inputs.d},
                   {"k", inputs.k},           {"batch", inputs.batch},
                   {"iterations", inputs.iterations},
                   {"c_pre", inputs.c_pre},   {"c_emb", inputs.c_emb},
                   {"c_fwd", inputs.c_fwd},   {"c_bwd", inputs.c_bwd},
                   {"c_upd", inputs.c_upd},   {"c_net", inputs.c_net},
                   {"bandwidth_gbps", inputs.net.bandwidth_gbps},
                   {"latency_us", inputs.net.latency_us},
                   {"record_bytes", inputs.net.record_bytes},
                   {"float_bytes", inputs.net.float_bytes}};
    j["single"] = estimate_to_json(single_estimate);
    j["distributed"] = estimate_to_json(distributed_estimate);
    write_canonical_file(path, j);
}

std::string render_comparison(const Comparison& comparison) {
    std::ostringstream out;
    out << "== comparison: single vs distributed ==\n";
    out << pad_right("metric", 36) << pad_left("single", 14) << pad_left("distributed", 14)
        << pad_left("improvement", 14) << '\n';
    for (const ComparisonRow& r : comparison.rows) {
        std::string improvement = format_fixed(r.improvement_pct, 2);
        improvement += r.name == "accuracy_points" ? "pp" : "%";
        out << pad_right(r.name, 36) << pad_left(format_fixed(r.single_value, 6), 14)
            << pad_left(format_fixed(r.distributed_value, 6), 14) << pad_left(improvement, 14)
            << '\n';
    }
    return out.str();
}

std::string render_bandwidth(std::span<const BandwidthRow> rows) {
    std::ostringstream out;
    out << "== simulated network bandwidth ==\n";
    out << pad_right("phase", 24) << pad_left("bytes", 14) << pad_left("sim_seconds", 14)
        << pad_left("avg_gbps", 12) << pad_left("peak_gbps", 12) << '\n';
    for (const BandwidthRow& r : rows) {
        out << pad_right(phase_name(r.phase), 24) << pad_left(std::to_string(r.bytes), 14)
            << pad_left(format_fixed(r.sim_seconds, 6), 14)
            << pad_left(format_fixed(r.avg_gbps, 3), 12)
            << pad_left(format_fixed(r.peak_gbps, 3), 12) << '\n';
    }
    return out.str();
}

std::string render_run_summary(const RunReport& report) {
    std::ostringstream out;
    if (report.mode == ReportMode::SingleNode) {
        out << "== single-node run ==\n";
    } else {
        out << "== distributed run (workers=" << report.workers << ") ==\n";
    }
    out << "examples: train=" << report.train_examples
        << " validation=" << report.validation_examples << " (ingest: retained="
        << report.ingest.retained << " dropped_neutral=" << report.ingest.dropped_neutral
        << " malformed=" << report.ingest.malformed << ")\n";
    out << "accuracy: " << format_fixed(report.metrics.accuracy, 4) << " (" << report.metrics.correct
        << "/" << report.metrics.total << ")  confusion: tn=" << report.metrics.confusion[0][0]
        << " fp=" << report.metrics.confusion[0][1] << " fn=" << report.metrics.confusion[1][0]
        << " tp=" << report.metrics.confusion[1][1] << '\n';
    out << "steps: " << report.phases.steps
        << "  sync_message_units: " << report.phases.sync_message_units
        << "  result_messages: " << report.phases.result_message_units << '\n';
    out << pad_right("phase", 24) << pad_left("wall_seconds", 14) << pad_left("node_seconds", 14)
        << pad_left("bytes", 14) << pad_left("net_seconds", 14) << '\n';
    for (int i = 0; i < kPhaseCount; ++i) {
        auto p = static_cast<Phase>(i);
        const PhaseStat& s = report.phases.at(p);
        if (s.wall_seconds == 0.0 && s.sim_seconds == 0.0 && s.bytes == 0) continue;
        bool net = is_network_phase(p);
        out << pad_right(phase_name(p), 24)
            << pad_left(net ? "-" : format_fixed(s.wall_seconds, 6), 14)
            << pad_left(net ? "-" : format_fixed(s.sim_seconds, 6), 14)
            << pad_left(net ? std::to_string(s.bytes) : "-", 14)
            << pad_left(net ? format_fixed(s.sim_seconds, 6) : "-", 14) << '\n';
    }
    out << "processing: wall=" << format_fixed(report.phases.processing_wall_seconds(), 6)
        << "s simulated=" << format_fixed(report.phases.processing_sim_seconds(), 6) << "s\n";
    return out.str();
}

std::string render_cost(const CostInputs& inputs, const CostEstimate& single_estimate,
                        const CostEstimate& distributed_estimate) {
    std::ostringstream out;
    const CostEstimate& s = single_estimate;
    const CostEstimate& d = distributed_estimate;
    out << "== analytic cost model ==\n";
    out << "inputs: n=" << inputs.n << " d=" << inputs.d << " k=" << inputs.k
        << " batch=" << inputs.batch << " iterations=" << inputs.iterations << '\n';
    out << "unit costs: c_pre=" << format_double(inputs.c_pre)
        << " c_emb=" << format_double(inputs.c_emb) << " c_fwd=" << format_double(inputs.c_fwd)
        << " c_bwd=" << format_double(inputs.c_bwd) << " c_upd=" << format_double(inputs.c_upd)
        << " c_net=" << format_double(inputs.c_net) << '\n';
    out << "single total: " << format_fixed(s.total, 6) << "s (preprocess="
        << format_fixed(s.preprocess, 6) << " embedding=" << format_fixed(s.embedding, 6)
        << " forward=" << format_fixed(s.forward, 6) << " backward=" << format_fixed(s.backward, 6)
        << " update=" << format_fixed(s.update, 6) << ")\n";
    out << "distributed total: " << format_fixed(d.total, 6) << "s (distribution="
        << format_fixed(d.distribution, 6) << " node_compute=" << format_fixed(d.node_compute(), 6)
        << " sync=" << format_fixed(d.sync, 6) << ")\n";
    out << "alternate readings: distribution_total=" << format_fixed(d.distribution_total, 6)
        << "s sync_star=" << format_fixed(d.sync_star, 6) << "s\n";
    out << "predicted speedup: " << format_fixed(d.predicted_speedup, 3) << "x\n";
    return out.str();
}

}  // namespace sentdist
