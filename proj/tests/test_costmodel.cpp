// Analytic cost model: closed-form estimates, calibration round-trip,
// communication-unit counting and the diminishing-returns knee.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sentdist/costmodel.hpp"
#include "sentdist/phase.hpp"
#include "sentdist/rng.hpp"

using namespace sentdist;

namespace {

CostInputs sample_inputs() {
    CostInputs ci;
    ci.n = 1000;
    ci.d = 10;
    ci.k = 4;
    ci.batch = 20;
    ci.iterations = 50;
    ci.c_pre = 1e-6;
    ci.c_emb = 2e-7;
    ci.c_fwd = 3e-8;
    ci.c_bwd = 4e-8;
    ci.c_upd = 5e-8;
    ci.c_net = 1e-5;
    ci.net.bandwidth_gbps = 10.0;
    ci.net.latency_us = 100.0;
    return ci;
}

}  // namespace

TEST_CASE("single-node training estimate matches hand-computed terms") {
    CostEstimate e = estimate_train_single(sample_inputs());
    CHECK(e.preprocess == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(e.embedding == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK(e.forward == doctest::Approx(3e-4).epsilon(1e-12));
    CHECK(e.backward == doctest::Approx(4e-4).epsilon(1e-12));
    CHECK(e.update == doctest::Approx(2.5e-5).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(3.725e-3).epsilon(1e-12));
    CHECK(e.distribution == 0.0);
    CHECK(e.sync == 0.0);
    CHECK(e.predicted_speedup == 1.0);
}

TEST_CASE("distributed training estimate matches hand-computed terms") {
    CostEstimate e = estimate_train_distributed(sample_inputs());
    // Record is (d+1)*8 = 88 bytes; 250 records per node at 10 Gbps.
    CHECK(e.distribution == doctest::Approx(1e-4 + 1.76e-5).epsilon(1e-12));
    CHECK(e.distribution_total == doctest::Approx(4e-4 + 7.04e-5).epsilon(1e-12));
    CHECK(e.preprocess == doctest::Approx(2.5e-4).epsilon(1e-12));
    CHECK(e.embedding == doctest::Approx(5e-4).epsilon(1e-12));
    CHECK(e.forward == doctest::Approx(7.5e-5).epsilon(1e-12));
    CHECK(e.backward == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(e.update == doctest::Approx(6.25e-6).epsilon(1e-12));
    // Tree shape: c_net * k * log2(k) * I = 1e-5 * 4 * 2 * 50.
    CHECK(e.sync == doctest::Approx(4e-3).epsilon(1e-12));
    // Star shape alternate: c_net * k * I.
    CHECK(e.sync_star == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(1.176e-4 + 9.3125e-4 + 4e-3).epsilon(1e-12));
    CHECK(e.predicted_speedup == doctest::Approx(3.725e-3 / e.total).epsilon(1e-12));
}

TEST_CASE("k=1 distributed estimate has zero tree-sync cost") {
    CostInputs ci = sample_inputs();
    ci.k = 1;
    CostEstimate e = estimate_train_distributed(ci);
    CHECK(e.sync == 0.0);                      // log2(1) = 0
    CHECK(e.sync_star == doctest::Approx(5e-4));  // star still pays per step
    CHECK(e.predicted_speedup <= 1.0);
}

TEST_CASE("test-phase estimates") {
    CostInputs ci = sample_inputs();
    CostEstimate s = estimate_test_single(ci);
    CHECK(s.forward == doctest::Approx(ci.c_fwd * 1000 * 10).epsilon(1e-12));
    CHECK(s.total == doctest::Approx(1e-3 + 2e-3 + 3e-4).epsilon(1e-12));
    CostEstimate d = estimate_test_distributed(ci);
    CHECK(d.forward == doctest::Approx(s.forward / 4).epsilon(1e-12));
    CHECK(d.total ==
          doctest::Approx(d.distribution + (s.total / 4)).epsilon(1e-12));
}

TEST_CASE("predicted speedup never exceeds the worker count") {
    SplitMix64 g(64);
    for (int iter = 0; iter < 200; ++iter) {
        CostInputs ci;
        ci.n = 1 + g.next_below(1000000);
        ci.d = 1 + g.next_below(1024);
        ci.k = 1 + g.next_below(64);
        ci.batch = 1 + g.next_below(512);
        ci.iterations = 1 + g.next_below(100000);
        ci.c_pre = g.next_double() * 1e-7;
        ci.c_emb = g.next_double() * 1e-8;
        ci.c_fwd = g.next_double() * 1e-9;
        ci.c_bwd = g.next_double() * 1e-9;
        ci.c_upd = g.next_double() * 1e-9;
        ci.c_net = g.next_double() * 1e-4;
        ci.net.latency_us = g.next_double() * 100.0;
        ci.net.bandwidth_gbps = 0.1 + g.next_double() * 100.0;
        CostEstimate e = estimate_train_distributed(ci);
        CHECK(e.predicted_speedup <= static_cast<double>(ci.k) + 1e-12);
        CHECK(e.predicted_speedup > 0.0);
    }
}

TEST_CASE("communication units follow the closed forms") {
    CostInputs ci = sample_inputs();
    ci.k = 4;
    ci.batch = 32;
    ci.iterations = 1000;
    CHECK(comm_overhead(ci, CommPhase::Train) == 128000);
    CHECK(comm_overhead(ci, CommPhase::Test) == 4);
    ci.k = 7;
    ci.batch = 5;
    ci.iterations = 3;
    CHECK(comm_overhead(ci, CommPhase::Train) == 105);
    CHECK(comm_overhead(ci, CommPhase::Test) == 7);
}

TEST_CASE("calibrate recovers constants from synthetic measurements") {
    CostInputs truth = sample_inputs();
    // Joint train solve assumes one shared compute constant.
    truth.c_fwd = truth.c_bwd = truth.c_upd = 2.5e-8;

    PhaseReport measured;
    const double n = 1000, d = 10, B = 20, I = 50, k = 4;
    measured.at(Phase::Preprocess).sim_seconds = truth.c_pre * n;
    measured.at(Phase::Embedding).sim_seconds = truth.c_emb * n * d;
    measured.at(Phase::Train).sim_seconds = truth.c_fwd * d * I * (2 * B + 1);
    measured.at(Phase::ModelSynchronization).sim_seconds = truth.c_net * k * I;

    CostInputs got = calibrate(measured, truth);
    CHECK(got.c_pre == doctest::Approx(truth.c_pre).epsilon(1e-12));
    CHECK(got.c_emb == doctest::Approx(truth.c_emb).epsilon(1e-12));
    CHECK(got.c_fwd == doctest::Approx(truth.c_fwd).epsilon(1e-12));
    CHECK(got.c_bwd == doctest::Approx(truth.c_bwd).epsilon(1e-12));
    CHECK(got.c_upd == doctest::Approx(truth.c_upd).epsilon(1e-12));
    CHECK(got.c_net == doctest::Approx(truth.c_net).epsilon(1e-12));

    // Estimates built from the calibrated constants reproduce the inputs.
    CostEstimate e = estimate_train_single(got);
    CHECK(e.preprocess == doctest::Approx(measured.at(Phase::Preprocess).sim_seconds));
    CHECK(e.embedding == doctest::Approx(measured.at(Phase::Embedding).sim_seconds));
    CHECK(e.forward + e.backward + e.update ==
          doctest::Approx(measured.at(Phase::Train).sim_seconds));
}

TEST_CASE("calibrate rejects time measured against a zero operation count") {
    CostInputs shape = sample_inputs();
    PhaseReport measured;
    measured.at(Phase::Train).sim_seconds = 1.0;
    shape.iterations = 1;  // fine
    CHECK_NOTHROW(calibrate(measured, shape));
    // Sync time measured but the shape says zero sync pairs cannot happen
    // (k and iterations are >= 1), so drive the error through preprocess:
    // a zero-op count comes from a zero n, which validate() rejects first.
    shape.n = 0;
    CHECK_THROWS_AS(calibrate(measured, shape), ConfigError);
    // Zero measured time is fine and yields a zero constant.
    PhaseReport idle;
    CostInputs got = calibrate(idle, sample_inputs());
    CHECK(got.c_pre == 0.0);
    CHECK(got.c_net == 0.0);
}

TEST_CASE("predicted totals over k show an interior knee when latency > 0") {
    CostInputs ci;
    ci.n = 200000;
    ci.d = 100;
    ci.batch = 32;
    ci.iterations = 1000;
    ci.c_pre = 0.0;
    ci.c_emb = 1e-9;
    ci.c_fwd = ci.c_bwd = ci.c_upd = 1e-8;
    ci.c_net = 1e-5;
    ci.net.latency_us = 50.0;
    ci.net.bandwidth_gbps = 10.0;

    std::vector<double> totals = predicted_totals(ci, 64);
    REQUIRE(totals.size() == 64);
    auto best = std::min_element(totals.begin(), totals.end());
    std::size_t best_k = static_cast<std::size_t>(best - totals.begin()) + 1;
    CHECK(best_k > 1);
    CHECK(best_k < 64);
    CHECK(*best < totals.front());
    CHECK(*best < totals.back());
}

TEST_CASE("cost input validation") {
    CostInputs ci = sample_inputs();
    CHECK_NOTHROW(ci.validate());
    ci.n = 0;
    CHECK_THROWS_AS(ci.validate(), ConfigError);
    ci = sample_inputs();
    ci.c_net = -1.0;
    CHECK_THROWS_AS(ci.validate(), ConfigError);
    ci = sample_inputs();
    ci.iterations = 0;
    CHECK_THROWS_AS(ci.validate(), ConfigError);
    ci = sample_inputs();
    ci.net.bandwidth_gbps = 0.0;
    CHECK_THROWS_AS(ci.validate(), ConfigError);
}
