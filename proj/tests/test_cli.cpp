// End-to-end checks of the command-line tool: exit codes, determinism,
// config round trip, record contents. Runs the built binary.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(ABC_CLI_PATH) + " " + args +
                      " > cli_stdout.tmp 2> cli_stderr.tmp";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WEXITSTATUS(rc);
    r.out = slurp("cli_stdout.tmp");
    r.err = slurp("cli_stderr.tmp");
    return r;
}

}  // namespace

TEST_CASE("spectrum: hydrogen table") {
    RunResult r = run_cli("spectrum --mass 1 --coulomb -1 --flux 0 --max-principal 2");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["results"].size() == 2);
    CHECK(j["results"][0]["energy"].get<double>() == Catch::Approx(-0.5));
    CHECK(j["results"][0]["degeneracy"].get<int>() == 1);
    CHECK(j["results"][1]["energy"].get<double>() == Catch::Approx(-0.125));
    CHECK(j["results"][1]["degeneracy"].get<int>() == 4);
    CHECK(j["config"]["command"] == "spectrum");
}

TEST_CASE("spectrum: fractional flux ground level") {
    RunResult r = run_cli("spectrum --mass 1 --coulomb -1 --flux 0.5 --max-principal 2");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["results"][0]["energy"].get<double>() ==
          Catch::Approx(-2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("spectrum: repulsive coupling is a precondition error") {
    RunResult r = run_cli("spectrum --mass 1 --coulomb 1 --flux 0");
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.err.find("repulsive") != std::string::npos);
    CHECK(r.err.find('\n') == r.err.size() - 1);  // single-line error
}

TEST_CASE("green: single point emits both evaluators and a small rel diff") {
    RunResult r = run_cli(
        "green --mass 1 --coulomb -1 --flux 0.3 --energy -0.35 "
        "--ra 1 --theta-a 1.0 --phi-a 0.4 --rb 2 --theta-b 1.9 --phi-b 2.5 "
        "--m-max 10 --n-max 36");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["results"].size() == 1);
    const auto& rec = j["results"][0];
    CHECK(rec["rel_diff"].get<double>() <= 1e-6);
    CHECK(rec["q_integral"]["re"].is_number());
    CHECK(rec["partial_wave"]["im"].is_number());
}

TEST_CASE("green: endpoint on the flux axis is rejected") {
    RunResult r = run_cli(
        "green --mass 1 --coulomb -1 --flux 0.3 --energy -0.4 "
        "--ra 1 --theta-a 0 --phi-a 0 --rb 2 --theta-b 1.9 --phi-b 2.5");
    CHECK(r.code == 2);
    CHECK(r.err.find("flux axis") != std::string::npos);
}

TEST_CASE("green: energy scan crosses the divergence threshold gracefully") {
    RunResult r = run_cli(
        "green --mass 1 --coulomb -1 --flux 0.3 "
        "--ra 1 --theta-a 1.0 --phi-a 0.4 --rb 2 --theta-b 1.9 --phi-b 2.5 "
        "--m-max 6 --n-max 28 --scan energy --scan-from -0.5 --scan-to -0.22 "
        "--scan-points 6");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["results"].size() == 6);
    // deep energies have both routes, shallow ones only the closed form
    CHECK(j["results"][0]["rel_diff"].is_number());
    CHECK(j["results"][5]["q_integral"].is_null());
    CHECK(j["results"][5]["partial_wave"]["re"].is_number());
}

TEST_CASE("deterministic output") {
    std::string args =
        "check --check ks --samples 2000 --seed 7 --mass 1 --coulomb -1 --flux 0.3";
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("check: batteries pass and report residuals") {
    RunResult r = run_cli(
        "check --check gamma-reduction --mass 1 --coulomb -1 --flux 0.25");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["results"].size() == 1);
    CHECK(j["results"][0]["pass"].get<bool>());
    CHECK(j["results"][0]["residual"].get<double>() <=
          j["results"][0]["tolerance"].get<double>());
}

TEST_CASE("check: spectrum battery within oracle tolerance") {
    RunResult r = run_cli("check --check spectrum --flux 0.25 --coulomb -1");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["results"][0]["residual"].get<double>() <= 1e-4);
}

TEST_CASE("config file round trip") {
    RunResult first = run_cli(
        "spectrum --mass 1.5 --coulomb -0.8 --flux 0.4 --max-principal 3");
    REQUIRE(first.code == 0);
    json j = json::parse(first.out);

    std::ofstream cfg("cli_roundtrip.cfg");
    for (auto& [k, v] : j["config"].items())
        cfg << k << " = " << v.get<std::string>() << "\n";
    cfg.close();

    RunResult second = run_cli("spectrum --config cli_roundtrip.cfg");
    REQUIRE(second.code == 0);
    CHECK(second.out == first.out);

    // explicit flags override file values
    RunResult third = run_cli("spectrum --config cli_roundtrip.cfg --flux 0.0");
    REQUIRE(third.code == 0);
    json j3 = json::parse(third.out);
    CHECK(j3["config"]["flux"] == "0");
    CHECK(j3["results"][0]["energy"].get<double>() ==
          Catch::Approx(-0.5 * 1.5 * 0.8 * 0.8));
}

TEST_CASE("csv format carries the config header") {
    RunResult r = run_cli(
        "spectrum --mass 1 --coulomb -1 --flux 0 --max-principal 2 --format csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# command = spectrum") != std::string::npos);
    CHECK(r.out.find("energy,principal,degeneracy,members") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli("spectrum --no-such-flag 1").code == 1);
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("green --format yaml").code == 1);
}
