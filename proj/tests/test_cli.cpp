#include <doctest.h>

#include "lab/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;
using semiflow::lab::exit_code;
using semiflow::lab::run_config;

namespace {

std::string env(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("semiflow-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int shell(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json radial_flow() { return json::parse(R"({"type": "ode", "G": {"op": "poly", "coeffs": [0, -1]}})"); }

}  // namespace

TEST_CASE("subcommand registry") {
    const auto& subs = semiflow::lab::subcommands();
    for (const char* s : {"flow-trace", "flow-check", "cocycle-check", "generator-check", "coboundary-check",
                          "transfer-check", "gpv", "bloch-gap", "bloch-gap-auto", "separability"})
        CHECK(std::find(subs.begin(), subs.end(), s) != subs.end());
}

TEST_CASE("flow-check on the radial flow passes") {
    const auto rep = run_config("flow-check", json{{"flow", radial_flow()}, {"samples", 20}});
    CHECK(rep.passed());
    CHECK(exit_code(rep) == 0);
}

TEST_CASE("generator-check on the trivial semigroup has zero residuals") {
    const json cfg{{"flow", json::parse(R"({"type": "ode", "G": {"op": "const", "value": 0}})")},
                   {"weight", json::parse(R"({"type": "none"})")},
                   {"function", json::parse(R"({"op": "poly", "coeffs": [0, 0, 1]})")}};
    const auto rep = run_config("generator-check", cfg);
    CHECK(exit_code(rep) == 0);
    REQUIRE(rep.tables.size() == 1);
    for (const auto& row : rep.tables[0].rows) CHECK(std::stod(row[1]) == 0.0);
}

TEST_CASE("bloch-gap with the unweighted semigroup reports a positive gap") {
    const json cfg{{"flow", radial_flow()}, {"N", 6}, {"t_start", 0.5}, {"weights", json::array({json::parse(R"({"type": "none"})")})}};
    const auto rep = run_config("bloch-gap", cfg);
    CHECK(exit_code(rep) == 0);
    CHECK(rep.summary["delta_hat"].get<double>() > 0.0);
}

TEST_CASE("library errors become exit code 2") {
    const auto rep = run_config("bloch-gap", json{{"flow", json::parse(R"({"type": "automorphism", "kind": "elliptic", "omega": 1})")},
                                                  {"N", 3}});
    CHECK(rep.error_kind == "CaseMismatch");
    CHECK(exit_code(rep) == 2);
    CHECK(exit_code(run_config("gpv", json{{"alpha", 0.1}})) == 2);
    CHECK(run_config("no-such-thing", json::object()).error_kind == "ConfigError");
}

TEST_CASE("sha256") {
    CHECK(semiflow::lab::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(semiflow::lab::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("every shipped configuration passes through the binary") {
    const std::string lab = env("SEMIFLOW_LAB"), configs = env("SEMIFLOW_CONFIGS");
    if (lab.empty() || configs.empty()) {
        MESSAGE("SEMIFLOW_LAB / SEMIFLOW_CONFIGS not set; skipping");
        return;
    }
    const auto out = scratch("configs");
    for (const auto& sub : semiflow::lab::subcommands()) {
        CAPTURE(sub);
        const fs::path cfg = fs::path(configs) / (sub + ".json");
        REQUIRE(fs::exists(cfg));
        CHECK(shell(lab + " " + sub + " --config " + cfg.string() + " --out " + (out / sub).string()) == 0);
        CHECK(fs::exists(out / sub / "report.json"));
        CHECK(fs::exists(out / sub / "metadata.json"));
        const auto report = json::parse(slurp(out / sub / "report.json"));
        CHECK(report["subcommand"] == sub);
        CHECK(report["config_digest"] == semiflow::lab::sha256_hex(slurp(cfg)));
    }
}

TEST_CASE("outputs do not depend on the worker count") {
    const std::string lab = env("SEMIFLOW_LAB"), configs = env("SEMIFLOW_CONFIGS");
    if (lab.empty() || configs.empty()) return;
    const auto out = scratch("threads");
    const std::string cfg = (fs::path(configs) / "bloch-gap.json").string();
    REQUIRE(shell("SEMIFLOW_THREADS=1 " + lab + " bloch-gap --config " + cfg + " --out " + (out / "one").string() + " --seed 3") == 0);
    REQUIRE(shell("SEMIFLOW_THREADS=4 " + lab + " bloch-gap --config " + cfg + " --out " + (out / "four").string() + " --seed 3") == 0);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(out / "one")) {
        if (entry.path().extension() != ".csv" && entry.path().filename() != "report.json") continue;
        CAPTURE(entry.path().filename().string());
        CHECK(slurp(entry.path()) == slurp(out / "four" / entry.path().filename()));
        ++compared;
    }
    CHECK(compared >= 2);
}

TEST_CASE("command line contract") {
    const std::string lab = env("SEMIFLOW_LAB"), configs = env("SEMIFLOW_CONFIGS");
    if (lab.empty() || configs.empty()) return;
    const auto out = scratch("contract");
    CHECK(shell(lab + " flow-check --out " + out.string()) != 0);
    CHECK(shell(lab + " flow-check --config /nonexistent.json --out " + out.string()) != 0);
    std::ofstream(out / "strict.json") << R"({"flow": {"type": "ode", "G": {"op": "poly", "coeffs": [0, -1]}},
        "samples": 10, "tolerances": {"semigroup": 1e-300}})";
    CHECK(shell(lab + " flow-check --config " + (out / "strict.json").string() + " --out " + (out / "s").string()) == 1);
    std::ofstream(out / "broken.json") << "{ not json";
    CHECK(shell(lab + " flow-check --config " + (out / "broken.json").string() + " --out " + (out / "b").string()) == 2);
}
