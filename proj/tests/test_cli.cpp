#include "doctest.h"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string output;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(TODA_LAB_BIN) + " " + args + " 2>&1";
    Run r{-1, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("toda_lab_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string shipped(const std::string& name) { return std::string(TODA_LAB_SOURCE_DIR) + "/configs/" + name; }

json small_torus() {
    return json::parse(R"({"n": 3, "mode": "torus", "grid": {"N": 64, "L": 1},
        "alpha": {"a": [[[1, 0]]], "an_plus": [[1, 0]], "an_minus": [[1, 0]]},
        "solver": {"tol": 1e-10, "max_iter": 50, "damping": 1.0}})");
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config_in.json";
    std::ofstream(p) << j.dump();
    return p;
}

}  // namespace

TEST_CASE("solve then verify toda on the shipped n = 3 torus") {
    const auto dir = scratch("n3_torus");
    const auto s = run("solve --config " + shipped("n3_torus.json") + " --out " + dir.string());
    REQUIRE(s.code == 0);
    const auto v = run("verify --check toda --out " + dir.string());
    CHECK(v.code == 0);
    const json rep = json::parse(slurp(dir / "verify_report.json"));
    CHECK(rep["toda"]["max_residual"].get<double>() < 1e-10);
    CHECK(rep["passed"].get<bool>());
    // the constant solution sits on the boundary of the norm chain
    CHECK(run("verify --check star --out " + dir.string()).code == 1);
}

TEST_CASE("certify scan exits cleanly") {
    const auto dir = scratch("certify");
    const auto r = run("certify --n 3 --step 0.001 --out " + dir.string());
    CHECK(r.code == 0);
    const json rep = json::parse(slurp(dir / "certify_report.json"));
    CHECK(rep["counterexample_count"].get<long>() == 0);
    CHECK(rep["exact_failures"].get<long>() == 0);
    CHECK(run("certify --n 3 --step 0.003 --out " + dir.string()).code == 2);
}

TEST_CASE("config errors exit 2 with a schema message") {
    const auto dir = scratch("bad");
    json missing = small_torus();
    missing.erase("n");
    auto r = run("solve --config " + write_config(dir, missing).string() + " --out " + (dir / "o").string());
    CHECK(r.code == 2);
    CHECK(r.output.find("missing required key \"n\"") != std::string::npos);

    json extra = small_torus();
    extra["grid"]["spacing"] = 0.1;
    r = run("solve --config " + write_config(dir, extra).string() + " --out " + (dir / "o").string());
    CHECK(r.code == 2);
    CHECK(r.output.find("unknown key \"spacing\"") != std::string::npos);

    json wrong = small_torus();
    wrong["alpha"]["a"] = json::array();
    CHECK(run("solve --config " + write_config(dir, wrong).string() + " --out " + (dir / "o").string()).code == 2);

    CHECK(run("solve --config " + (dir / "absent.json").string()).code == 2);
    CHECK(run("verify --out " + (dir / "nothing_here").string()).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("verify --check nonsense --out " + dir.string()).code == 2);
}

TEST_CASE("identical config and seed give byte-identical reports") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto cfg = write_config(a, small_torus());
    for (const auto& dir : {a, b}) {
        REQUIRE(run("solve --config " + cfg.string() + " --out " + dir.string()).code == 0);
        run("verify --out " + dir.string());
        REQUIRE(run("frame --out " + dir.string()).code == 0);
        run("variation --samples 20 --seed 5 --out " + dir.string());
    }
    for (const char* f : {"solve_report.json", "verify_report.json", "frame_report.json", "variation_report.json",
                          "frames.bin", "w1.csv", "w3.csv"}) {
        INFO(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }

    // a thread cap does not change results
    const auto c = scratch("det_c");
    REQUIRE(run("solve --config " + cfg.string() + " --out " + c.string(), "TODA_LAB_THREADS=1").code == 0);
    CHECK(slurp(a / "w2.csv") == slurp(c / "w2.csv"));
    CHECK(run("--threads 2 solve --config " + cfg.string() + " --out " + c.string()).code == 0);
    CHECK(slurp(a / "w2.csv") == slurp(c / "w2.csv"));
    CHECK(run("solve --config " + cfg.string() + " --out " + c.string(), "TODA_LAB_THREADS=many").code == 2);
}

TEST_CASE("frame refuses a solution above its recorded tolerance") {
    const auto dir = scratch("refuse");
    REQUIRE(run("solve --config " + write_config(dir, small_torus()).string() + " --out " + dir.string()).code == 0);
    json rep = json::parse(slurp(dir / "solve_report.json"));
    rep["tol"] = 1e-30;
    std::ofstream(dir / "solve_report.json") << rep.dump();
    const auto r = run("frame --out " + dir.string());
    CHECK(r.code == 2);
    CHECK(r.output.find("refusing") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "frames.bin"));
}

TEST_CASE("n = 2 pipeline") {
    const auto dir = scratch("n2");
    REQUIRE(run("solve --config " + shipped("n2_disk.json") + " --out " + dir.string()).code == 0);
    CHECK(run("verify --out " + dir.string()).code == 0);
    CHECK(run("variation --samples 10 --out " + dir.string()).code == 0);
    const json rep = json::parse(slurp(dir / "variation_report.json"));
    for (const auto& s : rep["samples"]) CHECK(s["value"].get<double>() < 0.0);
    CHECK(run("verify --check g2 --out " + dir.string()).code == 2);
}

TEST_CASE("algebra selftest") {
    const auto dir = scratch("algebra");
    CHECK(run("algebra selftest --out " + dir.string()).code == 0);
    CHECK(fs::exists(dir / "algebra_report.json"));
}
