// Command-line front end. Links only the C API.

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sentdist.h"

namespace {

int status_to_exit(sd_status st) {
    switch (st) {
        case SD_OK: return 0;
        case SD_ERR_INVALID_ARGUMENT: return 2;
        case SD_ERR_CONFIG: return 2;
        case SD_ERR_IO: return 3;
        case SD_ERR_DATA: return 3;
        case SD_ERR_CONTRACT: return 4;
        case SD_ERR_INTERNAL: return 4;
    }
    return 4;
}

int report_failure(sd_status st) {
    int line = sd_last_error_line();
    if (line > 0) {
        std::fprintf(stderr, "error: %s (line %d)\n", sd_last_error(), line);
    } else {
        std::fprintf(stderr, "error: %s\n", sd_last_error());
    }
    return status_to_exit(st);
}

struct ConfigHandle {
    sd_config* ptr = sd_config_create();
    ~ConfigHandle() { sd_config_destroy(ptr); }
};

struct ResultHandle {
    sd_result* ptr = nullptr;
    ~ResultHandle() { sd_result_destroy(ptr); }
};

// Pulls one key's value out of the config description ("key=value" lines).
std::string described_value(sd_config* cfg, const std::string& key) {
    std::istringstream text(sd_config_describe(cfg));
    std::string line;
    while (std::getline(text, line)) {
        if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 &&
            line[key.size()] == '=') {
            return line.substr(key.size() + 1);
        }
    }
    return std::string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentdist: distributed sentiment-classifier trainer and cost simulator"};

    std::string config_path;
    std::string mode = "both";
    std::uint64_t workers = 0;
    std::uint64_t subsample = 0;
    bool have_seed = false;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<std::uint64_t> sweep_ks;
    bool dry_run = false;
    std::vector<std::string> sets;

    app.add_option("--config", config_path, "Config file (INI)")->envname("SENTDIST_CONFIG");
    app.add_option("--mode", mode, "single | distributed | both | cost-only")
        ->default_val("both");
    app.add_option("--workers", workers, "Override cluster.workers and cost.k");
    app.add_option("--subsample", subsample, "Use only the first N documents");
    app.add_option("--seed", seed, "Override train.shuffle_seed");
    app.add_option("--out", out_dir, "Output directory for report files");
    app.add_option("--sweep", sweep_ks, "Worker counts to sweep (writes sweep.csv)")
        ->delimiter(',');
    app.add_flag("--dry-run", dry_run, "Validate and print the resolved config, run nothing");
    app.add_option("--set", sets, "Extra overrides as section.key=value")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    have_seed = app.count("--seed") > 0;

    ConfigHandle cfg;
    if (!cfg.ptr) {
        std::fprintf(stderr, "error: out of memory\n");
        return 4;
    }

    sd_status st;
    if (!config_path.empty()) {
        st = sd_config_load_file(cfg.ptr, config_path.c_str());
        if (st != SD_OK) return report_failure(st);
    }
    auto set_key = [&](const char* key, const std::string& value) {
        sd_status s = sd_config_set(cfg.ptr, key, value.c_str());
        return s;
    };
    if (workers > 0) {
        if ((st = set_key("cluster.workers", std::to_string(workers))) != SD_OK) {
            return report_failure(st);
        }
        if ((st = set_key("cost.k", std::to_string(workers))) != SD_OK) return report_failure(st);
    }
    if (subsample > 0) {
        if ((st = set_key("data.subsample", std::to_string(subsample))) != SD_OK) {
            return report_failure(st);
        }
    }
    if (have_seed) {
        if ((st = set_key("train.shuffle_seed", std::to_string(seed))) != SD_OK) {
            return report_failure(st);
        }
    }
    if (!out_dir.empty()) {
        if ((st = set_key("output.directory", out_dir)) != SD_OK) return report_failure(st);
    }
    for (const std::string& kv : sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects section.key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        if ((st = set_key(kv.substr(0, eq).c_str(), kv.substr(eq + 1))) != SD_OK) {
            return report_failure(st);
        }
    }

    if (dry_run) {
        st = sd_config_validate(cfg.ptr);
        if (st != SD_OK) return report_failure(st);
        std::printf("%s", sd_config_describe(cfg.ptr));
        std::printf("dry run: configuration is valid, nothing executed\n");
        return 0;
    }

    if (!sweep_ks.empty()) {
        std::vector<size_t> ks(sweep_ks.begin(), sweep_ks.end());
        std::string dir = out_dir.empty() ? described_value(cfg.ptr, "output.directory") : out_dir;
        if (dir.empty()) dir = ".";
        std::string csv = dir + "/sweep.csv";
        st = sd_sweep(cfg.ptr, ks.data(), ks.size(), csv.c_str());
        if (st != SD_OK) return report_failure(st);
        std::printf("wrote %s\n", csv.c_str());
        return 0;
    }

    ResultHandle res;
    st = sd_run(cfg.ptr, mode.c_str(), &res.ptr);
    if (st != SD_OK) return report_failure(st);
    std::printf("%s", sd_result_summary(res.ptr));
    st = sd_result_write(res.ptr, nullptr);
    if (st != SD_OK) return report_failure(st);
    return 0;
}
