// Config file parsing, overrides, validation diagnostics and fingerprints.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "sentdist/config.hpp"

using namespace sentdist;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("sentdist_test_" + name);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("default config validates and points at the bundled corpus") {
    ExperimentConfig cfg = default_config();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.data.input == std::filesystem::path("data/synthetic_tweets.csv"));
    CHECK(cfg.embedder.dimension == 256);
    CHECK(cfg.train.learning_rate == 0.01);
    CHECK(cfg.train.epochs == 10);
    CHECK(cfg.cluster.worker_count == 4);
}

TEST_CASE("ini files parse into every section") {
    auto p = temp_file("full.ini");
    write_file(p,
               "# full configuration exercise\n"
               "[data]\n"
               "input = /tmp/other.csv\n"
               "subsample = 500\n"
               "label_column = 2\n"
               "text_column = 3\n"
               "delimiter = ;\n"
               "negative_value = neg\n"
               "positive_value = pos\n"
               "neutral_value = mid\n"
               "\n"
               "[embedder]\n"
               "dimension = 128\n"
               "ngram_orders = 1, 2, 3\n"
               "hash_seed = 99\n"
               "\n"
               "[train]\n"
               "learning_rate = 0.05\n"
               "batch_size = 64\n"
               "epochs = 3\n"
               "train_fraction = 0.8\n"
               "l2 = 0.001\n"
               "shuffle_seed = 123\n"
               "\n"
               "[cluster]\n"
               "workers = 8\n"
               "sync_mode = local-epochs\n"
               "\n"
               "[network]\n"
               "bandwidth_gbps = 25\n"
               "latency_us = 10\n"
               "float_bytes = 4\n"
               "\n"
               "[cost]\n"
               "n = 5000\n"
               "iterations = 100\n"
               "\n"
               "[output]\n"
               "directory = /tmp/out\n"
               "emit_timings = yes\n"
               "export_transfers = true\n");
    ExperimentConfig cfg = parse_config_file(p);
    std::filesystem::remove(p);

    CHECK(cfg.data.input == std::filesystem::path("/tmp/other.csv"));
    CHECK(cfg.data.subsample == 500);
    CHECK(cfg.data.schema.label_column == 2);
    CHECK(cfg.data.schema.text_column == 3);
    CHECK(cfg.data.schema.delimiter == ';');
    CHECK(cfg.data.schema.negative_value == "neg");
    CHECK(cfg.data.schema.positive_value == "pos");
    CHECK(cfg.data.schema.neutral_value == "mid");
    CHECK(cfg.embedder.dimension == 128);
    CHECK(cfg.embedder.ngram_orders == std::vector<int>{1, 2, 3});
    CHECK(cfg.embedder.hash_seed == 99);
    CHECK(cfg.train.learning_rate == 0.05);
    CHECK(cfg.train.batch_size == 64);
    CHECK(cfg.train.epochs == 3);
    CHECK(cfg.train.train_fraction == 0.8);
    CHECK(cfg.train.l2 == 0.001);
    CHECK(cfg.train.shuffle_seed == 123);
    CHECK(cfg.cluster.worker_count == 8);
    CHECK(cfg.cluster.sync_mode == SyncMode::LocalEpochs);
    CHECK(cfg.network.bandwidth_gbps == 25.0);
    CHECK(cfg.network.latency_us == 10.0);
    CHECK(cfg.network.float_bytes == 4);
    CHECK(cfg.cost.n == 5000);
    CHECK(cfg.cost.iterations == 100);
    CHECK(cfg.output.directory == std::filesystem::path("/tmp/out"));
    CHECK(cfg.output.emit_timings);
    CHECK(cfg.output.export_transfers);
    // The network block feeds the cost model's network inputs.
    CHECK(cfg.cost.net.bandwidth_gbps == 25.0);
    CHECK(cfg.cost.net.latency_us == 10.0);
}

TEST_CASE("config errors carry 1-based line numbers") {
    auto p = temp_file("bad_value.ini");
    write_file(p, "[train]\nepochs = 3\nlearning_rate = fast\n");
    try {
        parse_config_file(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()) == "invalid value for train.learning_rate: 'fast'");
    }
    std::filesystem::remove(p);
}

TEST_CASE("unknown keys and malformed lines are rejected with their line") {
    auto p = temp_file("unknown.ini");
    write_file(p, "[train]\nwarp_speed = 9\n");
    try {
        parse_config_file(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("unknown config key: train.warp_speed") !=
              std::string::npos);
    }
    write_file(p, "[cluster\nworkers = 2\n");
    try {
        parse_config_file(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 1);
    }
    write_file(p, "[train]\nno equals sign here\n");
    CHECK_THROWS_AS(parse_config_file(p), ConfigError);
    std::filesystem::remove(p);
    CHECK_THROWS_AS(parse_config_file(p), IoError);
}

TEST_CASE("comments, blank lines and whitespace are tolerated") {
    auto p = temp_file("comments.ini");
    write_file(p,
               "; leading comment\n"
               "\n"
               "[ train ]\n"
               "  epochs   =   7  \n"
               "# another comment\n"
               "batch_size=16\r\n");
    ExperimentConfig cfg = parse_config_file(p);
    std::filesystem::remove(p);
    CHECK(cfg.train.epochs == 7);
    CHECK(cfg.train.batch_size == 16);
}

TEST_CASE("apply_override mirrors file parsing without line numbers") {
    ExperimentConfig cfg = default_config();
    apply_override(cfg, "train.epochs", "5");
    CHECK(cfg.train.epochs == 5);
    apply_override(cfg, "cluster.workers", "2");
    CHECK(cfg.cluster.worker_count == 2);
    apply_override(cfg, "network.bandwidth_gbps", "1.5");
    CHECK(cfg.cost.net.bandwidth_gbps == 1.5);  // kept in sync
    try {
        apply_override(cfg, "train.epochs", "banana");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 0);
    }
    CHECK_THROWS_AS(apply_override(cfg, "nosuch.key", "1"), ConfigError);
}

TEST_CASE("bool and list values accept the documented spellings") {
    ExperimentConfig cfg = default_config();
    for (const char* yes : {"true", "1", "yes", "on"}) {
        apply_override(cfg, "output.emit_timings", yes);
        CHECK(cfg.output.emit_timings);
        apply_override(cfg, "output.emit_timings", "false");
    }
    for (const char* no : {"false", "0", "no", "off"}) {
        apply_override(cfg, "output.emit_timings", "true");
        apply_override(cfg, "output.emit_timings", no);
        CHECK_FALSE(cfg.output.emit_timings);
    }
    CHECK_THROWS_AS(apply_override(cfg, "output.emit_timings", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "embedder.ngram_orders", "1,0"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "embedder.ngram_orders", ""), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "cluster.sync_mode", "sometimes"), ConfigError);
}

TEST_CASE("fingerprint identifies the experiment, not the output routing") {
    ExperimentConfig a = default_config();
    ExperimentConfig b = default_config();
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint().size() == 16);

    apply_override(b, "output.directory", "/somewhere/else");
    apply_override(b, "output.emit_timings", "true");
    CHECK(a.fingerprint() == b.fingerprint());

    apply_override(b, "train.shuffle_seed", "8");
    CHECK(a.fingerprint() != b.fingerprint());

    ExperimentConfig c = default_config();
    apply_override(c, "embedder.dimension", "128");
    CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("describe lists resolved values in a stable key=value form") {
    ExperimentConfig cfg = default_config();
    std::string text = cfg.describe();
    CHECK(text.find("embedder.dimension=256\n") != std::string::npos);
    CHECK(text.find("train.learning_rate=0.01\n") != std::string::npos);
    CHECK(text.find("cluster.sync_mode=synchronous\n") != std::string::npos);
    CHECK(text.find("output.directory=out\n") != std::string::npos);
    CHECK(cfg.describe() == text);  // stable across calls
}

TEST_CASE("config validation rejects out-of-range values at the config layer") {
    ExperimentConfig cfg = default_config();
    apply_override(cfg, "train.train_fraction", "0.999999");
    CHECK_NOTHROW(cfg.validate());
    apply_override(cfg, "train.train_fraction", "1");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    apply_override(cfg, "cluster.workers", "4097");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    apply_override(cfg, "embedder.dimension", "0");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
