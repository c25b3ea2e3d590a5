#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("fpdvi_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const TempDir& scratch) {
    const fs::path out_log = scratch.path / "stdout.log";
    const fs::path err_log = scratch.path / "stderr.log";
    const std::string cmd = std::string("\"") + FPDVI_CLI_PATH + "\" " + args +
                            " > \"" + out_log.string() + "\" 2> \"" +
                            err_log.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_log);
    r.err = slurp(err_log);
    return r;
}

std::string problem(const char* name) {
    return std::string("\"") + FPDVI_PROBLEMS_DIR + "/" + name + ".json\"";
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("run solves the decay instance and writes the full file set",
          "[cli]") {
    TempDir tmp;
    const fs::path out = tmp.path / "results";
    const auto r = run_cli("run " + problem("scalar_decay") + " --out \"" +
                               out.string() + "\"",
                           tmp);
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    const std::string csv = slurp(out / "trajectory.csv");
    REQUIRE_FALSE(csv.empty());
    CHECK(csv.rfind("xi,theta_1,u_1\n", 0) == 0);
    CHECK(line_count(csv) == 258); // header + 257 nodes (N = 256)

    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report["converged"] == true);
    CHECK(report["exit_code"] == 0);
    CHECK(report["name"] == "scalar_decay");
    CHECK(report["configuration"]["alpha"] == 0.5);
    CHECK(report.contains("fpdvi_residual"));
    CHECK_FALSE(report.contains("runtime")); // timings stay on stdout

    const json hyp = json::parse(slurp(out / "hypotheses.json"));
    CHECK(hyp["skipped"] == false);
    CHECK(hyp["hard_fail"] == false);
    CHECK(json::parse(slurp(out / "trajectory.json")).contains("theta"));
    CHECK(r.out.find("converged") != std::string::npos);
}

TEST_CASE("same-seed runs are byte-identical", "[cli]") {
    TempDir tmp;
    const fs::path a = tmp.path / "a";
    const fs::path b = tmp.path / "b";
    const std::string base = "run " + problem("scalar_decay") + " --out \"";
    REQUIRE(run_cli(base + a.string() + "\"", tmp).exit_code == 0);
    REQUIRE(run_cli(base + b.string() + "\"", tmp).exit_code == 0);

    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "hypotheses.json") == slurp(b / "hypotheses.json"));
    CHECK(slurp(a / "trajectory.json") == slurp(b / "trajectory.json"));
}

TEST_CASE("a non-contractive instance exits 2 with an honest report",
          "[cli]") {
    TempDir tmp;
    const fs::path out = tmp.path / "results";
    const auto r = run_cli("run " + problem("diverging") +
                               " --skip-hypotheses --out \"" + out.string() +
                               "\"",
                           tmp);
    CHECK(r.exit_code == 2);
    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report["converged"] == false);
    CHECK(report["exit_code"] == 2);

    // Machine-parsable stderr record.
    const json record = json::parse(r.err);
    CHECK(record["error"] == "MaxOuterExceeded");
    CHECK(record["exit"] == 2);
}

TEST_CASE("parse failures exit 1 with a JSON diagnostic", "[cli]") {
    TempDir tmp;
    const auto missing =
        run_cli("run \"/nonexistent/nowhere.json\" --out \"" +
                    (tmp.path / "x").string() + "\"",
                tmp);
    CHECK(missing.exit_code == 1);
    CHECK(json::parse(missing.err)["error"] == "ParseError");

    const auto malformed = run_cli(
        "run \"" + std::string(FPDVI_TEST_DATA_DIR) + "/bad.json\" --out \"" +
            (tmp.path / "y").string() + "\"",
        tmp);
    CHECK(malformed.exit_code == 1);
    const json record = json::parse(malformed.err);
    CHECK(record["error"] == "ParseError");
    CHECK(record["exit"] == 1);
}

TEST_CASE("strict mode turns a hypothesis hard-fail into exit 3", "[cli]") {
    TempDir tmp;
    const fs::path out = tmp.path / "results";
    // The coupled benchmark's growth data violates the existence inequality
    // (its forcing is 1-Lipschitz in the state), so --strict must refuse.
    const auto r = run_cli("run " + problem("linear_coupled") +
                               " --strict --out \"" + out.string() + "\"",
                           tmp);
    CHECK(r.exit_code == 3);
    CHECK(json::parse(r.err)["error"] == "HypothesisHardFail");

    const json hyp = json::parse(slurp(out / "hypotheses.json"));
    CHECK(hyp["hard_fail"] == true);
    CHECK(hyp["existence_inequality"]["pass"] == false);
    CHECK_FALSE(fs::exists(out / "report.json")); // refused before solving

    // Without --strict the same instance still solves.
    const fs::path lax = tmp.path / "lax";
    const auto ok = run_cli("run " + problem("linear_coupled") + " --out \"" +
                                lax.string() + "\"",
                            tmp);
    CHECK(ok.exit_code == 0);
    CHECK(json::parse(slurp(lax / "report.json"))["converged"] == true);
}

TEST_CASE("sweep writes one summary row per value", "[cli]") {
    TempDir tmp;
    const fs::path out = tmp.path / "sweep";
    const auto r = run_cli("sweep " + problem("scalar_decay") +
                               " --parameter alpha --values 0.4,0.6 --grid 64 "
                               "--skip-hypotheses --out \"" +
                               out.string() + "\"",
                           tmp);
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    const std::string summary = slurp(out / "summary.csv");
    CHECK(summary.rfind("value,converged,iterations,residual,runtime\n", 0) ==
          0);
    CHECK(line_count(summary) == 3);

    int subdirs = 0;
    for (const auto& entry : fs::directory_iterator(out)) {
        if (!entry.is_directory()) continue;
        CHECK(entry.path().filename().string().rfind("sweep_alpha_", 0) == 0);
        CHECK(fs::exists(entry.path() / "report.json"));
        ++subdirs;
    }
    CHECK(subdirs == 2);
}

TEST_CASE("usage errors exit 1", "[cli]") {
    TempDir tmp;
    // Missing required --values.
    const auto no_values = run_cli(
        "sweep " + problem("scalar_decay") + " --parameter alpha", tmp);
    CHECK(no_values.exit_code == 1);

    // Unknown subcommand.
    CHECK(run_cli("frobnicate", tmp).exit_code == 1);

    // Malformed --grid override.
    const auto bad_grid = run_cli("run " + problem("scalar_decay") +
                                      " --grid nope --out \"" +
                                      (tmp.path / "g").string() + "\"",
                                  tmp);
    CHECK(bad_grid.exit_code == 1);
    CHECK(json::parse(bad_grid.err)["error"] == "ValidationError");
}
