#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "oscfrac_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

RunResult run_cli(const std::string& args) {
    const fs::path out_path = work_dir() / "stdout.txt";
    const std::string cmd =
        std::string(OSCFRAC_CLI_PATH) + " " + args + " >" + out_path.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
    r.out = slurp(out_path);
    return r;
}

// exponential-corrected system: cheap to simulate, conclusive criteria
std::string base_config(const std::string& extra) {
    const fs::path csv = work_dir() / "traj.csv";
    const fs::path rep = work_dir() / "report.json";
    return std::string("[system]\n") +
           "alpha = 0.5\n"
           "p = \"exp(2*t-1)*sqrt(t)\"\n"
           "q = \"exp(-2*t)*sqrt(t)\"\n"
           "r = \"sqrt(e*t)\"\n"
           "f = \"u\"\n"
           "g = \"v\"\n"
           "h = \"w\"\n"
           "sigma = \"t-1\"\n"
           "tau = \"t-1/2\"\n"
           "k = 1\n"
           "l = 1\n"
           "l_prime = 1\n"
           "m_prime = 1\n"
           "t0 = 10\n"
           "\n[history]\n"
           "u0 = \"exp(t)\"\n"
           "v0 = \"exp(-t)\"\n"
           "w0 = \"exp(t)\"\n"
           "T1 = 9\n"
           "\n[simulate]\n"
           "t_end = 20\n"
           "dt = 0.01\n"
           "window_lo = 10\n"
           "window_hi = 20\n"
           "min_crossings = 5\n"
           "\n[criteria]\n"
           "rho = \"1/(s^(7/2)*exp(2*s))\"\n"
           "horizons = 1e2, 1e3, 1e4\n"
           "\n[output]\n"
           "trajectory_csv = " +
           csv.string() + "\nreport_json = " + rep.string() + "\n" + extra;
}

}  // namespace

TEST_CASE("simulate writes a trajectory CSV and a classification report") {
    const fs::path cfg = work_dir() / "sim.ini";
    spit(cfg, base_config(""));
    auto r = run_cli("simulate --config " + cfg.string());
    CAPTURE(r.out);
    REQUIRE(r.exit_code == 0);

    const std::string csv = slurp(work_dir() / "traj.csv");
    REQUIRE(csv.rfind("t,u,v,w\n", 0) == 0);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    double prev_t = -1;
    int rows = 0;
    while (std::getline(lines, line)) {
        const double t = std::stod(line);
        CHECK(t > prev_t);
        prev_t = t;
        ++rows;
    }
    CHECK(rows == 1001);

    const std::string rep_text = slurp(work_dir() / "report.json");
    auto rep = json::parse(rep_text);
    CHECK(rep["system"] == "nonoscillatory-positive");
    CHECK(rep["truncated"] == false);
    // reports round-trip byte-identically
    CHECK(rep.dump(2) + "\n" == rep_text);
}

TEST_CASE("simulate with t_end = t0 emits a single data row") {
    const fs::path cfg = work_dir() / "sim0.ini";
    std::string text = base_config("");
    const auto pos = text.find("t_end = 20");
    text.replace(pos, 10, "t_end = 10");
    spit(cfg, text);
    auto r = run_cli("simulate --config " + cfg.string());
    CAPTURE(r.out);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(work_dir() / "traj.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}

TEST_CASE("advanced arguments are rejected at config load") {
    const fs::path cfg = work_dir() / "bad_sigma.ini";
    std::string text = base_config("");
    const auto pos = text.find("sigma = \"t-1\"");
    text.replace(pos, 13, "sigma = \"t+1\"");
    spit(cfg, text);
    auto r = run_cli("simulate --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("config error") != std::string::npos);
}

TEST_CASE("unknown keys are rejected") {
    const fs::path cfg = work_dir() / "unknown_key.ini";
    spit(cfg, base_config("typo_key = 1\n"));
    auto r = run_cli("simulate --config " + cfg.string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("criteria report round-trips and carries evidence") {
    const fs::path cfg = work_dir() / "crit.ini";
    spit(cfg, base_config(""));
    auto r = run_cli("criteria --config " + cfg.string() +
                     " --select coefficient,weighted");
    CAPTURE(r.out);
    REQUIRE(r.exit_code == 0);

    const std::string rep_text = slurp(work_dir() / "report.json");
    auto rep = json::parse(rep_text);
    REQUIRE(rep.is_array());
    REQUIRE(rep.size() == 2);
    CHECK(rep[0]["id"] == "coefficient-integrals");
    CHECK(rep[0]["verdict"] == "NotSatisfied");
    CHECK(rep[1]["id"] == "weighted-divergence");
    CHECK(rep[1]["verdict"] == "NotSatisfied");
    for (const auto& probe : rep[1]["probes"]) {
        CHECK(probe.contains("classification"));
        CHECK(probe["evidence"].size() >= 3);
        for (const auto& ev : probe["evidence"]) {
            CHECK(ev.contains("horizon"));
            CHECK(ev.contains("partial_value"));
        }
    }
    CHECK(rep.dump(2) + "\n" == rep_text);
}

TEST_CASE("explicitly empty selection yields an empty report") {
    const fs::path cfg = work_dir() / "crit_empty.ini";
    spit(cfg, base_config(""));
    auto r = run_cli("criteria --config " + cfg.string() + " --select \"\"");
    REQUIRE(r.exit_code == 0);
    auto rep = json::parse(slurp(work_dir() / "report.json"));
    CHECK(rep.is_array());
    CHECK(rep.empty());
}

TEST_CASE("unknown criterion name is a config error") {
    const fs::path cfg = work_dir() / "crit_bad.ini";
    spit(cfg, base_config(""));
    auto r = run_cli("criteria --config " + cfg.string() + " --select bogus");
    CHECK(r.exit_code == 2);
}

TEST_CASE("strict mode turns inconclusive verdicts into exit 4") {
    // sigma = t - 20 drives the composed delay nonpositive on the grid,
    // which the kernel criterion reports as Inconclusive
    const fs::path cfg = work_dir() / "crit_inconclusive.ini";
    std::string text = base_config("");
    const auto pos = text.find("sigma = \"t-1\"");
    text.replace(pos, 13, "sigma = \"t-20\"");
    spit(cfg, text);
    auto r = run_cli("criteria --config " + cfg.string() + " --select kernel --strict");
    CAPTURE(r.out);
    CHECK(r.exit_code == 4);
    auto r2 = run_cli("criteria --config " + cfg.string() + " --select kernel");
    CHECK(r2.exit_code == 0);
    auto rep = json::parse(slurp(work_dir() / "report.json"));
    CHECK(rep[0]["verdict"] == "Inconclusive");
}

TEST_CASE("verify command exit codes") {
    auto ok = run_cli("verify exponential-corrected");
    CAPTURE(ok.out);
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("[pass]") != std::string::npos);

    auto unknown = run_cli("verify no-such-scenario");
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("properties command prints the per-property table") {
    auto r = run_cli("properties --alpha 0.5");
    CAPTURE(r.out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("max rel err") != std::string::npos);
}

TEST_CASE("missing config file") {
    auto r = run_cli("simulate --config /nonexistent/path.ini");
    CHECK(r.exit_code == 2);
}
