#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "loopspace/io.hpp"

using namespace loopspace;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LOOPSPACE_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cli exit codes follow the contract") {
    const fs::path dir = temp_dir("loopspace_cli");

    // Missing and malformed configs are configuration errors.
    CHECK(run_cli("run --config " + (dir / "absent.json").string() + " 2>/dev/null") ==
          2);
    write_text_atomic(dir / "bad.json", "{\"suites\": [\"mollify\"], \"grid_n\": 2}");
    CHECK(run_cli("run --config " + (dir / "bad.json").string() + " 2>/dev/null") == 2);

    // A malformed loop file inside the config is a configuration error too.
    write_text_atomic(dir / "loop.json", "{\"kind\": \"mystery\"}");
    write_text_atomic(dir / "cfg_badloop.json",
                      "{\"suites\": [\"actions\"], \"loop_files\": [\"" +
                          (dir / "loop.json").string() + "\"]}");
    CHECK(run_cli("run --config " + (dir / "cfg_badloop.json").string() +
                  " 2>/dev/null") == 2);

    // A small healthy run exits 0 and writes its report atomically.
    write_text_atomic(dir / "cfg.json",
                      "{\"suites\": [\"mollify\"], \"grid_n\": 128, \"corpus_count\": 3, "
                      "\"seed\": 9}");
    const fs::path report = dir / "report.json";
    const fs::path csv = dir / "report.csv";
    CHECK(run_cli("run --config " + (dir / "cfg.json").string() + " --report " +
                  report.string() + " --csv " + csv.string() + " 2>/dev/null") == 0);
    const auto payload = nlohmann::json::parse(read_text(report));
    CHECK(payload["summary"]["failed"].get<int>() == 0);
    CHECK(payload["checks"].size() > 3);
    CHECK(read_text(csv).rfind("check,anchor,residual,tolerance,pass\n", 0) == 0);

    fs::remove_all(dir);
}

TEST_CASE("cli generates deterministic corpora and analyses them") {
    const fs::path dir = temp_dir("loopspace_cli_gen");
    const std::string gen = "gen --kind fourier_random --seed 11 --count 3 --dim 1 --out ";
    CHECK(run_cli(gen + (dir / "a").string() + " 2>/dev/null") == 0);
    CHECK(run_cli(gen + (dir / "b").string() + " 2>/dev/null") == 0);
    for (int i = 0; i < 3; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "loop_%03d.json", i);
        CHECK(read_text(dir / "a" / name) == read_text(dir / "b" / name));
    }

    // The continuity analyzer consumes the generated corpus.
    const fs::path report = dir / "continuity.json";
    CHECK(run_cli("actions --space smooth --delta 0.3 --corpus " + (dir / "a").string() +
                  " --report " + report.string() + " 2>/dev/null") == 0);
    const auto payload = nlohmann::json::parse(read_text(report));
    CHECK(payload["space"] == "smooth");
    CHECK(payload["levels"].size() >= 7);

    // The sup-norm space is refuted at the representation level.
    const fs::path c0_report = dir / "c0.json";
    CHECK(run_cli("actions --space c0 --delta 0.3 --grid-n 128 --corpus-count 3 "
                  "--report " + c0_report.string() + " 2>/dev/null") == 0);
    const auto c0 = nlohmann::json::parse(read_text(c0_report));
    CHECK(c0["levels"][0]["status"] == "refuted");
    CHECK(c0["levels"][0]["witness"]["lower_bound"].get<double>() == 2.0);

    fs::remove_all(dir);
}
