#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinboson/cli.hpp"

using namespace spinboson;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "spinboson");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("spinboson_cli_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("model info on the physical example") {
    const Run r = run({"model", "info"});
    REQUIRE(r.code == kExitOk);
    const auto j = parse(r);
    CHECK(j["lambda_c"].get<double>() == doctest::Approx(0.126157).epsilon(1e-5));
    CHECK(j["classification"] == "infrared-critical");
    CHECK(j["config_digest"].get<std::string>().size() == 16);
}

TEST_CASE("ed ground on the free model") {
    const Run r = run({"--set", "model.lambda=0", "--set", "discretization.n_modes=2", "--set",
                       "discretization.n_max=2", "--set", "discretization.N_max=2", "--set",
                       "discretization.regularize_mass=0.1", "ed", "ground"});
    REQUIRE(r.code == kExitOk);
    CHECK(parse(r)["energy"].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("validation errors exit with code 1") {
    CHECK(run({"--set", "model.bogus=1", "model", "info"}).code == kExitValidation);
    CHECK(run({"frobnicate"}).code == kExitValidation);
    CHECK(run({"--config", "/nonexistent/file.ini", "model", "info"}).code == kExitValidation);
    const Run massless = run({"ed", "ground"});  // cannot discretize a massless continuum
    CHECK(massless.code == kExitValidation);
    CHECK(massless.err.find("error [") != std::string::npos);
}

TEST_CASE("fkn cross-check on the single-mode model") {
    const Run r = run({"--set", "discretization.scheme=manual", "--set", "discretization.omega=1", "--set",
                       "discretization.v=1", "--set", "discretization.n_max=20", "--set",
                       "discretization.N_max=20", "--set", "model.lambda=0.2", "--set", "mc.T=5", "--set",
                       "mc.samples=40000", "--seed", "7", "--threads", "1", "xcheck", "fkn"});
    REQUIRE(r.code == kExitOk);
    const auto j = parse(r);
    CHECK(j["cells"].size() == 1);
    CHECK(j["max_sigma"].get<double>() <= 3.0);
}

TEST_CASE("mc output is reproducible and written to the output directory") {
    const auto dir = scratch("mc");
    const std::vector<std::string> args = {"--set", "discretization.scheme=manual", "--set", "discretization.omega=1",
                                           "--set", "discretization.v=1", "--set", "model.lambda=0.3",
                                           "--set", "mc.T=2", "--set", "mc.samples=5000", "--seed", "3",
                                           "--out", dir.string(), "mc", "partition"};
    const Run a = run(args);
    REQUIRE(a.code == kExitOk);
    const Run b = run(args);
    const auto ja = parse(a), jb = parse(b);
    CHECK(ja["value"] == jb["value"]);
    CHECK(ja["stderr"] == jb["stderr"]);
    CHECK(ja["seed"] == 3);
    CHECK(ja["version"].is_string());
    std::ifstream f(dir / "mc_partition.json");
    REQUIRE(f.good());
    CHECK(nlohmann::json::parse(f)["value"] == ja["value"]);
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv format and kernel table") {
    const auto dir = scratch("kernel");
    const Run r = run({"--format", "csv", "--set", "kernel.source=continuum", "--set", "kernel.t_max=5", "--out",
                       dir.string(), "kernel", "table"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("t,W,Phi,V\n", 0) == 0);
    CHECK(std::filesystem::exists(dir / "kernel_table.csv"));
    std::ifstream f(dir / "kernel_table.json");
    const auto j = nlohmann::json::parse(f);
    CHECK(j["l1_fubini"].get<double>() == doctest::Approx(2 * M_PI).epsilon(1e-10));
    std::filesystem::remove_all(dir);
}

TEST_CASE("reproduce runs a selected criterion") {
    const auto dir = scratch("reproduce");
    const Run r = run({"--out", dir.string(), "reproduce", "--only", "3"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("criterion  3") != std::string::npos);
    std::ifstream f(dir / "acceptance.json");
    REQUIRE(f.good());
    CHECK(nlohmann::json::parse(f)["criteria"].size() == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("version flag") {
    const Run r = run({"--version"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find('.') != std::string::npos);
}
