#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    auto d = fs::temp_directory_path() / "mkdvq_cli_test";
    fs::create_directories(d);
    return d;
}

int run(const std::string& sub, const std::string& config_text, const fs::path& out) {
    auto cfg = scratch() / (sub + ".json");
    std::ofstream(cfg) << config_text;
    std::string cmd = std::string(MKDVQ_BIN) + " " + sub + " --config " + cfg.string() + " --out " + out.string() +
                      " > " + (scratch() / "log.txt").string() + " 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("painleve table") {
    auto out = scratch() / "pain";
    CHECK(run("painleve", R"({"s": [0, 0.3], "y": {"from": -1, "to": 1, "n": 3}})", out) == 0);
    CHECK(fs::exists(out / "painleve.csv"));
}

TEST_CASE("rhsolve with a dump") {
    auto out = scratch() / "rh";
    CHECK(run("rhsolve", R"({"reflection": {"preset":"odd","gamma":2,"kappa":3}, "route":"sigma",
                             "x":[1.0], "t":[0.05], "dump": true})",
              out) == 0);
    CHECK(fs::exists(out / "rhsolve.csv"));
    CHECK(fs::exists(out / "contour.json"));
    CHECK(fs::exists(out / "mu_nodes.csv"));
}

TEST_CASE("spectral summary") {
    auto out = scratch() / "spec";
    CHECK(run("spectral", R"({"data": {"u0": {"kind":"expr","form":"gaussian","amp":0.2,"center":3,"width":1},
                                       "x_max": 12}, "grid": {"K": 3, "n": 17}})",
              out) == 0);
    std::ifstream in(out / "spectral.json");
    auto j = nlohmann::json::parse(in);
    CHECK(j.at("sup_r").get<double>() < 1.0);
}

TEST_CASE("trivial verify passes and writes plots") {
    auto out = scratch() / "zero";
    CHECK(run("verify", R"({"mode":"similarity","reflection":{"preset":"zero"},"tau":[50,100,200,400]})", out) == 0);
    auto plots = scratch() / "plots";
    std::string cfg = R"({"mode":"plots","reports":[")" + (out / "similarity_report.json").string() + R"("]})";
    CHECK(run("verify", cfg, plots) == 0);
}

TEST_CASE("configuration errors exit with 2") {
    auto out = scratch() / "bad";
    CHECK(run("verify", R"({"mode":"similarity","reflection":{"preset":"zero"},"tau":[]})", out) == 2);
    CHECK(run("painleve", "{not json", out) == 2);
    CHECK(run("verify", R"({"mode":"plots","reports":["/nonexistent/report.json"]})", out) == 1);
}
