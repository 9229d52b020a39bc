// End-to-end checks of the command-line front end (exit codes, output files).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SENTDIST_CLI_PATH
#error "SENTDIST_CLI_PATH must point at the CLI binary"
#endif
#ifndef SENTDIST_DATA_DIR
#error "SENTDIST_DATA_DIR must point at the bundled data directory"
#endif

namespace {

namespace fs = std::filesystem;

struct Outcome {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome run_cli(const std::string& args, const std::string& env_prefix = "") {
    fs::path dir = fs::temp_directory_path();
    fs::path out_file = dir / "sentdist_cli_stdout.txt";
    fs::path err_file = dir / "sentdist_cli_stderr.txt";
    std::string cmd = env_prefix + std::string(SENTDIST_CLI_PATH) + " " + args + " > " +
                      out_file.string() + " 2> " + err_file.string();
    int rc = std::system(cmd.c_str());
    Outcome o;
    o.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    o.out = read_file(out_file);
    o.err = read_file(err_file);
    return o;
}

std::string data_csv() {
    return std::string(SENTDIST_DATA_DIR) + "/synthetic_tweets.csv";
}

std::string small_args(const std::string& extra) {
    return "--set data.input=" + data_csv() +
           " --subsample 600 --set embedder.dimension=32 --set train.epochs=2 " + extra;
}

}  // namespace

TEST_CASE("successful single run exits 0 and writes reports") {
    fs::path out = fs::temp_directory_path() / "sentdist_cli_run";
    fs::remove_all(out);
    Outcome o = run_cli(small_args("--mode single --out " + out.string()));
    CHECK(o.exit_code == 0);
    CHECK(o.out.find("single-node run") != std::string::npos);
    CHECK(fs::exists(out / "single.json"));
    fs::remove_all(out);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("--definitely-not-a-flag").exit_code == 2);

    Outcome mode = run_cli(small_args("--mode sideways"));
    CHECK(mode.exit_code == 2);
    CHECK(mode.err.find("unknown mode") != std::string::npos);

    Outcome setv = run_cli(small_args("--set train.epochs=banana --dry-run"));
    CHECK(setv.exit_code == 2);
    CHECK(setv.err.find("train.epochs") != std::string::npos);

    Outcome noeq = run_cli("--set no_equals_here --dry-run");
    CHECK(noeq.exit_code == 2);
    CHECK(noeq.err.find("--set expects") != std::string::npos);
}

TEST_CASE("missing input exits 3") {
    Outcome o = run_cli("--mode single --set data.input=/nonexistent/corpus.csv");
    CHECK(o.exit_code == 3);
    CHECK(o.err.find("error:") != std::string::npos);
}

TEST_CASE("config file errors carry the line number") {
    fs::path ini = fs::temp_directory_path() / "sentdist_cli_bad.ini";
    std::ofstream(ini) << "[train]\nepochs = 2\nbatch_size = zero\n";
    Outcome o = run_cli("--config " + ini.string() + " --dry-run");
    CHECK(o.exit_code == 2);
    CHECK(o.err.find("(line 3)") != std::string::npos);
    fs::remove(ini);
}

TEST_CASE("dry run validates, prints the resolved config, executes nothing") {
    fs::path out = fs::temp_directory_path() / "sentdist_cli_dry";
    fs::remove_all(out);
    Outcome o = run_cli(small_args("--dry-run --workers 3 --out " + out.string()));
    CHECK(o.exit_code == 0);
    CHECK(o.out.find("dry run: configuration is valid, nothing executed") != std::string::npos);
    CHECK(o.out.find("cluster.workers=3\n") != std::string::npos);
    CHECK(o.out.find("embedder.dimension=32\n") != std::string::npos);
    CHECK_FALSE(fs::exists(out));  // nothing written
}

TEST_CASE("config file via the environment variable") {
    fs::path ini = fs::temp_directory_path() / "sentdist_cli_env.ini";
    std::ofstream(ini) << "[train]\nepochs = 5\n";
    Outcome o = run_cli("--dry-run", "SENTDIST_CONFIG=" + ini.string() + " ");
    CHECK(o.exit_code == 0);
    CHECK(o.out.find("train.epochs=5\n") != std::string::npos);
    fs::remove(ini);
}

TEST_CASE("sweep writes sweep.csv in the output directory") {
    fs::path out = fs::temp_directory_path() / "sentdist_cli_sweep";
    fs::remove_all(out);
    fs::create_directories(out);
    Outcome o = run_cli(small_args("--sweep 1,2 --out " + out.string()));
    CHECK(o.exit_code == 0);
    CHECK(o.out.find("wrote ") != std::string::npos);
    std::string csv = read_file(out / "sweep.csv");
    CHECK(csv.rfind("k,wall_seconds,sim_seconds,predicted_seconds,accuracy\n", 0) == 0);
    fs::remove_all(out);
}

TEST_CASE("identical configurations produce byte-identical reports") {
    fs::path a = fs::temp_directory_path() / "sentdist_cli_rep_a";
    fs::path b = fs::temp_directory_path() / "sentdist_cli_rep_b";
    fs::remove_all(a);
    fs::remove_all(b);
    std::string common = small_args("--mode both --workers 2 --seed 99 --out ");
    REQUIRE(run_cli(common + a.string()).exit_code == 0);
    REQUIRE(run_cli(common + b.string()).exit_code == 0);
    for (const char* name : {"single.json", "distributed.json", "comparison.json"}) {
        INFO(name);
        std::string left = read_file(a / name);
        REQUIRE(!left.empty());
        CHECK(left == read_file(b / name));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}
