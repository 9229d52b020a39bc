#include "sentdist/costmodel.hpp"

#include <cmath>

namespace sentdist {

namespace {

double checked_cost(double value, const char* key) {
    if (value < 0.0 || !std::isfinite(value)) {
        throw ConfigError(std::string("cost.") + key + " must be >= 0 and finite");
    }
    return value;
}

std::uint64_t resolved_record_bytes(const CostInputs& ci) {
    return ci.net.record_bytes != 0 ? ci.net.record_bytes : (ci.d + 1) * ci.net.float_bytes;
}

}  // namespace

void CostInputs::validate() const {
    if (n < 1) throw ConfigError("cost.n must be >= 1");
    if (d < 1) throw ConfigError("cost.d must be >= 1");
    if (k < 1) throw ConfigError("cost.k must be >= 1");
    if (batch < 1) throw ConfigError("cost.batch must be >= 1");
    if (iterations < 1) throw ConfigError("cost.iterations must be >= 1");
    checked_cost(c_pre, "c_pre");
    checked_cost(c_emb, "c_emb");
    checked_cost(c_fwd, "c_fwd");
    checked_cost(c_bwd, "c_bwd");
    checked_cost(c_upd, "c_upd");
    checked_cost(c_net, "c_net");
    net.validate();
}

CostEstimate estimate_train_single(const CostInputs& ci) {
    ci.validate();
    const double n = static_cast<double>(ci.n);
    const double d = static_cast<double>(ci.d);
    const double B = static_cast<double>(ci.batch);
    const double I = static_cast<double>(ci.iterations);

    CostEstimate e;
    e.preprocess = ci.c_pre * n;
    e.embedding = ci.c_emb * n * d;
    // Per-epoch form c * n * d * epochs with epochs = I*B/n; n cancels.
    e.forward = ci.c_fwd * d * I * B;
    e.backward = ci.c_bwd * d * I * B;
    e.update = ci.c_upd * d * I;
    e.total = e.node_compute();
    e.predicted_speedup = 1.0;
    return e;
}

CostEstimate estimate_train_distributed(const CostInputs& ci) {
    CostEstimate single = estimate_train_single(ci);
    const double k = static_cast<double>(ci.k);
    const double n = static_cast<double>(ci.n);
    const double I = static_cast<double>(ci.iterations);
    const double rb = static_cast<double>(resolved_record_bytes(ci));
    const double latency = ci.net.latency_us * 1e-6;
    const double bits_per_second = ci.net.bandwidth_gbps * 1e9;

    CostEstimate e;
    e.preprocess = single.preprocess / k;
    e.embedding = single.embedding / k;
    e.forward = single.forward / k;
    e.backward = single.backward / k;
    e.update = single.update / k;
    e.distribution = latency + (n / k) * rb * 8.0 / bits_per_second;
    e.distribution_total = k * latency + n * rb * 8.0 / bits_per_second;
    e.sync = ci.c_net * k * std::log2(k) * I;
    e.sync_star = ci.c_net * k * I;
    e.total = e.distribution + e.node_compute() + e.sync;
    e.predicted_speedup = e.total > 0.0 ? single.total / e.total : 1.0;
    return e;
}

CostEstimate estimate_test_single(const CostInputs& ci) {
    ci.validate();
    const double n = static_cast<double>(ci.n);
    const double d = static_cast<double>(ci.d);

    CostEstimate e;
    e.preprocess = ci.c_pre * n;
    e.embedding = ci.c_emb * n * d;
    e.forward = ci.c_fwd * n * d;
    e.total = e.node_compute();
    e.predicted_speedup = 1.0;
    return e;
}

CostEstimate estimate_test_distributed(const CostInputs& ci) {
    CostEstimate single = estimate_test_single(ci);
    const double k = static_cast<double>(ci.k);
    const double n = static_cast<double>(ci.n);
    const double rb = static_cast<double>(resolved_record_bytes(ci));
    const double latency = ci.net.latency_us * 1e-6;
    const double bits_per_second = ci.net.bandwidth_gbps * 1e9;

    CostEstimate e;
    e.preprocess = single.preprocess / k;
    e.embedding = single.embedding / k;
    e.forward = single.forward / k;
    e.distribution = latency + (n / k) * rb * 8.0 / bits_per_second;
    e.distribution_total = k * latency + n * rb * 8.0 / bits_per_second;
    e.total = e.distribution + e.node_compute();
    e.predicted_speedup = e.total > 0.0 ? single.total / e.total : 1.0;
    return e;
}

std::uint64_t comm_overhead(const CostInputs& ci, CommPhase phase) {
    ci.validate();
    switch (phase) {
        case CommPhase::Train: return ci.k * ci.batch * ci.iterations;
        case CommPhase::Test: return ci.k;
    }
    throw ContractViolation("comm_overhead: unknown phase");
}

CostInputs calibrate(const PhaseReport& measured, const CostInputs& shape) {
    shape.validate();
    auto solve = [](double seconds, double count, const char* what) {
        if (seconds <= 0.0) return 0.0;
        if (count <= 0.0) {
            throw DataError(std::string("calibrate: measured ") + what +
                            " time with a zero operation count");
        }
        return seconds / count;
    };

    const double n = static_cast<double>(shape.n);
    const double d = static_cast<double>(shape.d);
    const double B = static_cast<double>(shape.batch);
    const double I = static_cast<double>(shape.iterations);
    const double k = static_cast<double>(shape.k);

    CostInputs out = shape;
    out.c_pre = solve(measured.at(Phase::Preprocess).sim_seconds, n, "preprocess");
    out.c_emb = solve(measured.at(Phase::Embedding).sim_seconds, n * d, "embedding");
    // One train-phase measurement covers forward, backward and update work:
    // per step that is d*B forward, d*B backward and d update operations.
    // Solved jointly under the convention c_fwd = c_bwd = c_upd.
    double c_train = solve(measured.at(Phase::Train).sim_seconds, d * I * (2.0 * B + 1.0), "train");
    out.c_fwd = c_train;
    out.c_bwd = c_train;
    out.c_upd = c_train;
    // Per worker-step pair; well-defined at any k, unlike the k*log2(k)
    // headline shape which vanishes at k=1.
    out.c_net = solve(measured.at(Phase::ModelSynchronization).sim_seconds, k * I, "sync");
    return out;
}

std::vector<double> predicted_totals(CostInputs ci, std::size_t k_max) {
    require(k_max >= 1, "predicted_totals: k_max must be >= 1");
    std::vector<double> totals;
    totals.reserve(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        ci.k = k;
        totals.push_back(estimate_train_distributed(ci).total);
    }
    return totals;
}

}  // namespace sentdist
