#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef LOGLIN_CLI_PATH
#define LOGLIN_CLI_PATH "loglin"
#endif

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LOGLIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

long count_lines(const std::string& s) {
    long n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("bad config exits with code 2") {
    const fs::path dir = fresh_dir("loglin_cli_bad");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK(run_cli("sweep --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("sweep --config " + (dir / "missing.json").string()) == 2);
    std::ofstream(dir / "bad2.json") << R"({"n_mc": 0})";
    CHECK(run_cli("sweep --config " + (dir / "bad2.json").string()) == 2);
    CHECK(run_cli("no_such_subcommand") == 2);
    CHECK(run_cli("track --methods nope --runs 1") == 2);
}

TEST_CASE("sweep writes csv and manifest with the expected row count") {
    const fs::path dir = fresh_dir("loglin_cli_sweep");
    CHECK(run_cli("sweep --out " + dir.string() +
                  " --alpha-count 2 --delta-count 2 --n-mc 2 --oracle-samples 1000 "
                  "--seed 9") == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(count_lines(csv) == 1 + 2 * 2 * 2); // header + cells x methods
    CHECK(csv.rfind("alpha,delta,method,E_x,E_X,n_fail", 0) == 0);
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("config_hash") != std::string::npos);
}

TEST_CASE("sweep output bytes do not depend on the worker count") {
    const fs::path d1 = fresh_dir("loglin_cli_w1");
    const fs::path d4 = fresh_dir("loglin_cli_w4");
    const std::string common =
        " --alpha-count 2 --delta-count 2 --n-mc 2 --oracle-samples 1000 --seed 12";
    CHECK(run_cli("sweep --workers 1 --out " + d1.string() + common) == 0);
    CHECK(run_cli("sweep --workers 4 --out " + d4.string() + common) == 0);
    CHECK(slurp(d1 / "sweep.csv") == slurp(d4 / "sweep.csv"));
    CHECK(slurp(d1 / "manifest.json") == slurp(d4 / "manifest.json"));
}

TEST_CASE("track emits one row per run and method") {
    const fs::path dir = fresh_dir("loglin_cli_track");
    CHECK(run_cli("track --out " + dir.string() +
                  " --runs 3 --horizon 5 --methods ffk,ull --seed 2") == 0);
    const std::string csv = slurp(dir / "track.csv");
    CHECK(count_lines(csv) == 1 + 3 * 2);
    CHECK(csv.rfind("run_id,method,E_x,E_X,cycle_mean_s", 0) == 0);
}

TEST_CASE("gradcheck passes and honors --trials") {
    CHECK(run_cli("gradcheck --trials 5 --seed 3") == 0);
}

TEST_CASE("conjugacy writes the density grids") {
    const fs::path dir = fresh_dir("loglin_cli_conj");
    CHECK(run_cli("conjugacy --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "example_multimodal.csv"));
    CHECK(fs::exists(dir / "variance_linearizations.csv"));
    const std::string csv = slurp(dir / "variance_linearizations.csv");
    CHECK(csv.rfind("solution,y,lambda_log,lambda_inv,alpha_post,beta_post,proper", 0) == 0);
}

TEST_CASE("kernel flag selects the backend") {
    const fs::path d_scalar = fresh_dir("loglin_cli_kscalar");
    CHECK(run_cli("sweep --kernel scalar --out " + d_scalar.string() +
                  " --alpha-count 1 --delta-count 1 --n-mc 1 --oracle-samples 1000") == 0);
    const std::string manifest = slurp(d_scalar / "manifest.json");
    CHECK(manifest.find("\"kernel\": \"scalar\"") != std::string::npos);
    CHECK(run_cli("sweep --kernel bogus --out " + d_scalar.string()) == 2);
}

TEST_SUITE_END();
