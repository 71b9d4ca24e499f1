#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/run.hpp"

using namespace curvlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("curvlab_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::vector<std::string>& args) {
    std::ostringstream log;
    const int code = run(args, log);
    INFO(log.str());
    return code;
}

} // namespace

TEST_CASE("help and argument errors") {
    std::ostringstream log;
    CHECK(run({"--help"}, log) == kExitPass);
    CHECK(log.str().find("curvature") != std::string::npos);
    CHECK(run_cli({}) == kExitInvalidInput);
    CHECK(run_cli({"frobnicate"}) == kExitInvalidInput);
    CHECK(run_cli({"compare", "--mode", "nope"}) == kExitInvalidInput);
}

TEST_CASE("bad metric specs and configs exit 2") {
    const fs::path dir = fresh_dir("bad");
    CHECK(run_cli({"mollify", "--metric", "hw9(1.5)", "--out", dir.string()}) ==
          kExitInvalidInput);
    CHECK(run_cli({"mollify", "--metric", "hw1(5.0)", "--out", dir.string()}) ==
          kExitInvalidInput);

    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << "{\"per\": 1}";
    CHECK(run_cli({"mollify", "--config", cfg.string(), "--out", dir.string()}) ==
          kExitInvalidInput);
    std::ofstream(cfg) << "{\"resolution\": 33,";
    CHECK(run_cli({"mollify", "--config", cfg.string(), "--out", dir.string()}) ==
          kExitInvalidInput);
    CHECK(run_cli({"mollify", "--config", (dir / "absent.json").string()}) == kExitInvalidInput);
    // compare needs a k or a bracket
    CHECK(run_cli({"compare", "--metric", "flat", "--out", dir.string()}) == kExitInvalidInput);
}

TEST_CASE("mollify writes a report and a metric csv") {
    const fs::path dir = fresh_dir("mollify");
    CHECK(run_cli({"mollify", "--metric", "hw1(1.5)", "--resolution", "33", "--eps", "0.2",
                   "--out", dir.string()}) == kExitPass);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "smoothed.csv"));
    const std::string rep = slurp(dir / "report.json");
    CHECK(rep.find("\"status\": \"pass\"") != std::string::npos);
    CHECK(rep.find("\"lambda_min\"") != std::string::npos);
    CHECK(rep.find("timing") == std::string::npos);
}

TEST_CASE("config file merges under flag overrides") {
    const fs::path dir = fresh_dir("merge");
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"json({"metric": "hw2(1.5)", "resolution": 17, "eps": [0.3]})json";
    CHECK(run_cli({"mollify", "--config", cfg.string(), "--resolution", "21", "--out",
                   dir.string()}) == kExitPass);
    const std::string rep = slurp(dir / "report.json");
    CHECK(rep.find("\"metric\": \"hw2(1.5)\"") != std::string::npos); // from file
    CHECK(rep.find("\"resolution\": 21") != std::string::npos);       // flag wins
}

TEST_CASE("reports are bit for bit reproducible") {
    const fs::path d1 = fresh_dir("rep1"), d2 = fresh_dir("rep2");
    const std::vector<std::string> base{"compare",      "--metric", "constk(1)", "--mode",
                                        "cbb",          "--k",      "1.0",       "--quadruples",
                                        "150",          "--seed",   "99",        "--radius",
                                        "0.8"};
    auto args1 = base;
    args1.push_back("--out");
    args1.push_back(d1.string());
    auto args2 = base;
    args2.push_back("--out");
    args2.push_back(d2.string());
    CHECK(run_cli(args1) == kExitPass);
    CHECK(run_cli(args2) == kExitPass);
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "verdicts.csv") == slurp(d2 / "verdicts.csv"));
}

TEST_CASE("comparison failures drive the exit code") {
    const fs::path dir = fresh_dir("flatfail");
    // flat space does not have curvature >= 0.5
    CHECK(run_cli({"compare", "--metric", "flat", "--mode", "cbb", "--k", "0.5", "--quadruples",
                   "400", "--radius", "1.5", "--out", dir.string()}) == kExitFailedVerdict);
    const std::string rep = slurp(dir / "report.json");
    CHECK(rep.find("\"status\": \"fail\"") != std::string::npos);

    const fs::path ok = fresh_dir("flatok");
    CHECK(run_cli({"compare", "--metric", "flat", "--mode", "cbb", "--k", "0.0", "--quadruples",
                   "250", "--out", ok.string()}) == kExitPass);
}

TEST_CASE("distance subcommand on a tiny schedule") {
    const fs::path dir = fresh_dir("dist");
    CHECK(run_cli({"distance", "--metric", "hw1(1.5)", "--eps", "0.3,0.2", "--pairs", "4",
                   "--resolution", "48", "--out", dir.string()}) == kExitPass);
    CHECK(fs::exists(dir / "distances.csv"));
    const std::string rep = slurp(dir / "report.json");
    CHECK(rep.find("\"non_increasing\": true") != std::string::npos);
}

TEST_CASE("constant curvature lower bound scan passes at its own k") {
    const fs::path dir = fresh_dir("constk_scan");
    CHECK(run_cli({"curvature", "--metric", "constk(1)", "--k", "1", "--dir", "lower", "--out",
                   dir.string()}) == kExitPass);
    // the smallest eps decides; the coarser entry may sit outside tolerance
    const std::string rep = slurp(dir / "report.json");
    CHECK(rep.find("\"within_tolerance\": true") != std::string::npos);
}

TEST_CASE("canned pipeline recovers the single axis minimizer") {
    const fs::path dir = fresh_dir("example1");
    CHECK(run_cli({"example", "hw1", "--lambda", "1.5", "--resolution", "65", "--sweeps", "30",
                   "--starts", "8", "--out", dir.string()}) == kExitPass);
    CHECK(fs::exists(dir / "paths.csv"));
    const std::string rep = slurp(dir / "report.json");
    CHECK(rep.find("\"count\": 1") != std::string::npos);
}
