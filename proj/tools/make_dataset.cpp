// Generates the bundled synthetic tweet corpus. Deterministic for a given
// (--count, --neutral, --seed) triple, so the checked-in CSV can be
// reproduced byte-for-byte.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "sentdist/synthetic.hpp"
#include "sentdist/types.hpp"

int main(int argc, char** argv) {
    CLI::App app{"make_dataset: write a deterministic synthetic tweet CSV"};

    std::string out_path = "data/synthetic_tweets.csv";
    std::uint64_t count = 20000;
    std::uint64_t neutral = 150;
    std::uint64_t seed = 2009;

    app.add_option("--out", out_path, "Output CSV path")->capture_default_str();
    app.add_option("--count", count, "Number of labeled documents")->capture_default_str();
    app.add_option("--neutral", neutral, "Number of interleaved neutral rows")
        ->capture_default_str();
    app.add_option("--seed", seed, "Generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    sentdist::SyntheticSpec spec;
    spec.count = static_cast<std::size_t>(count);
    spec.neutral_count = static_cast<std::size_t>(neutral);
    spec.seed = seed;

    try {
        std::filesystem::path parent = std::filesystem::path(out_path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        sentdist::write_synthetic_csv(out_path, spec);
    } catch (const sentdist::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    std::printf("wrote %s (%llu documents, %llu neutral rows, seed %llu)\n", out_path.c_str(),
                static_cast<unsigned long long>(count), static_cast<unsigned long long>(neutral),
                static_cast<unsigned long long>(seed));
    return 0;
}
