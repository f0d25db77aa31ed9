#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaygrad/cli.hpp"
#include "delaygrad/io.hpp"

using namespace delaygrad;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::initializer_list<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::vector<std::string>(args), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/delaygrad_test_") + name;
}

}  // namespace

TEST_CASE("coeffs emits the geometric tail row") {
    const auto r = cli({"coeffs", "--alpha", "0.5", "--tau", "0", "--k", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("k,b_k,bound_regime,bound_value\n", 0) == 0);
    CHECK(r.out.find("\n3,0.125,2,") != std::string::npos);
}

TEST_CASE("roots certification reports all four clauses") {
    const auto r =
        cli({"roots", "--alpha", "0.02", "--tau", "1", "--certify"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("clauses").at("dominant_real").get<bool>());
    CHECK(j.at("clauses").at("dominant_bound").get<bool>());
    CHECK(j.at("clauses").at("nondominant_bound").get<bool>());
    CHECK(j.at("clauses").at("derivative_bound").get<bool>());
    CHECK(j.at("all_pass").get<bool>());
}

TEST_CASE("bad flag values name the flag and exit 1") {
    const auto r = cli({"simulate", "--alg", "dgd", "--tau", "1", "--eta",
                        "invalid", "--k", "5"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--eta") != std::string::npos);

    const auto bad_tau = cli({"simulate", "--tau", "nope"});
    CHECK(bad_tau.code == 1);
    CHECK(bad_tau.err.find("--tau") != std::string::npos);

    CHECK(cli({"no_such_command"}).code == 1);
}

TEST_CASE("tune prints a 17-digit eta") {
    const auto r = cli({"tune", "--curvature", "convex", "--mu", "1",
                        "--tau", "1", "--sigma2", "1", "--e0", "1", "--k",
                        "400"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("eta").get<double>() == 0.05);
}

TEST_CASE("simulate trajectories are deterministic given flags") {
    const auto a = cli({"simulate", "--alg", "sdgd", "--d", "4", "--tau", "2",
                        "--eta", "0.02", "--sigma2", "1", "--k", "40",
                        "--seed", "9"});
    const auto b = cli({"simulate", "--alg", "sdgd", "--d", "4", "--tau", "2",
                        "--eta", "0.02", "--sigma2", "1", "--k", "40",
                        "--seed", "9"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("k,subopt,algorithm,tau,eta,sigma2,seed\n", 0) == 0);
}

TEST_CASE("dump-config round-trips into --config") {
    const auto dumped = cli({"coeffs", "--alpha", "0.25", "--tau", "2", "--k",
                             "7", "--method", "recurrence", "--dump-config"});
    CHECK(dumped.code == 0);
    const std::string cfg_path = temp_path("coeffs_cfg.json");
    write_text_file(cfg_path, dumped.out);

    const auto direct = cli({"coeffs", "--alpha", "0.25", "--tau", "2", "--k",
                             "7", "--method", "recurrence"});
    const auto loaded = cli({"coeffs", "--config", cfg_path});
    CHECK(loaded.code == 0);
    CHECK(loaded.out == direct.out);

    const auto mixed = cli({"coeffs", "--config", cfg_path, "--tau", "3"});
    CHECK(mixed.code == 1);
    std::remove(cfg_path.c_str());
}

TEST_CASE("bounds respects --force for out-of-region curves") {
    const auto strict = cli({"bounds", "--kind", "thm1", "--mu", "1",
                             "--lambda", "0.1", "--eta", "0.5", "--tau", "1",
                             "--k", "20"});
    CHECK(strict.code == 1);
    const auto forced = cli({"bounds", "--kind", "thm1", "--mu", "1",
                             "--lambda", "0.1", "--eta", "0.5", "--tau", "1",
                             "--k", "20", "--force"});
    CHECK(forced.code == 0);
    CHECK(forced.out.find(",0,thm1_upper") != std::string::npos);
}

TEST_CASE("lowerbound subcommand emits a passing report") {
    const auto r = cli({"lowerbound", "--kind", "convex", "--mu", "1",
                        "--tau", "1", "--k", "16", "--alg", "dgd"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("bound_pass").get<bool>());
    CHECK(j.at("span_pass").get<bool>());
}

TEST_CASE("sweep writes byte-identical outputs across thread counts") {
    const std::string spec_path = temp_path("sweep_spec.json");
    write_text_file(spec_path, R"({
      "kind": "stochastic_tau",
      "d": 4, "lambda": 0.1, "mu": 1.0, "e0_norm": 1.0,
      "taus": [1, 2], "sigma2s": [1.0], "ks": [50],
      "trials": 100, "seed": 31, "eta_rule": "paper"
    })");
    const std::string p1 = temp_path("sweep_a");
    const std::string p2 = temp_path("sweep_b");
    CHECK(cli({"sweep", "--spec", spec_path, "--out", p1, "--threads", "1"})
              .code == 0);
    CHECK(cli({"sweep", "--spec", spec_path, "--out", p2, "--threads", "4"})
              .code == 0);
    CHECK(read_text_file(p1 + ".csv") == read_text_file(p2 + ".csv"));
    CHECK(read_text_file(p1 + ".csv")
              .rfind("algorithm,tau,batch,sigma2,k,", 0) == 0);
    for (const auto& p : {p1, p2}) {
        std::remove((p + ".csv").c_str());
        std::remove((p + ".meta.json").c_str());
    }
    std::remove(spec_path.c_str());
}
