#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef RWRE_CLI_PATH
#define RWRE_CLI_PATH "./rwre"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string out_path = "cli_test_out.json";
    const std::string cmd = std::string(RWRE_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

} // namespace

TEST_CASE("p0 subcommand") {
    const auto r = run_cli("p0");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("7.06024") != std::string::npos);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("config_hash"));
    CHECK(j.contains("version"));
}

TEST_CASE("validate accepts and rejects laws") {
    {
        std::ofstream law("cli_good_law.json");
        law << R"({"dim":1,"u_hat":[1],"atoms":[{"weight":1.0,"jumps":[{"z":[0],"p":0.5},{"z":[1],"p":0.5}]}]})";
    }
    const auto good = run_cli("validate --law cli_good_law.json");
    CHECK(good.exit_code == 0);

    {
        std::ofstream law("cli_bad_law.json");
        law << R"({"dim":1,"u_hat":[1],"atoms":[{"weight":1.0,"jumps":[{"z":[-1],"p":0.5},{"z":[1],"p":0.5}]}]})";
    }
    const auto bad = run_cli("validate --law cli_bad_law.json");
    CHECK(bad.exit_code == 2);
    const auto j = nlohmann::json::parse(bad.out);
    CHECK(j["forbidden_direction_ok"] == false);
    CHECK(j["violations"].size() == 1);
    CHECK(j["violations"][0]["atom"] == 0);

    const auto malformed = run_cli("validate --law does_not_exist.json");
    CHECK(malformed.exit_code == 1);
}

TEST_CASE("examples batteries") {
    CHECK(run_cli("examples --name deterministic").exit_code == 0);
    CHECK(run_cli("examples --name const-drift").exit_code == 0);
    CHECK(run_cli("examples --name lazy-nn --seed 5").exit_code == 0);
}

TEST_CASE("blocks writes the CSV dump") {
    const auto r = run_cli("blocks --preset lazy-nn --count 100 --csv cli_blocks.csv");
    CHECK(r.exit_code == 0);
    std::ifstream csv("cli_blocks.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("replicate,block_index,duration,displacement0") == 0);
    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) rows += line.empty() ? 0 : 1;
    CHECK(rows == 100);
}

TEST_CASE("remaining example batteries") {
    CHECK(run_cli("examples --name two-jump-homogeneous --seed 3").exit_code == 0);
    CHECK(run_cli("examples --name one-two-jump --seed 4").exit_code == 0);
    CHECK(run_cli("examples --name nonesuch").exit_code == 1);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    const auto a = run_cli("velocity --preset one-two-jump --count 4000 --seed 9 --threads 1");
    const auto b = run_cli("velocity --preset one-two-jump --count 4000 --seed 9 --threads 2");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("RWRE_SEED overrides the configured seed") {
    const auto a = run_cli("blocks --preset lazy-nn --count 50 --seed 1 --csv cli_a.csv");
    CHECK(a.exit_code == 0);
    const int rc = std::system((std::string("RWRE_SEED=1 ") + RWRE_CLI_PATH +
                                " blocks --preset lazy-nn --count 50 --seed 2 --csv cli_b.csv "
                                "> /dev/null 2>&1")
                                   .c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    std::ifstream fa("cli_a.csv"), fb("cli_b.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("kappas subcommand reports the exact coefficients") {
    const auto r = run_cli("kappas --preset lazy-nn");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["kappa_m_sq"].get<double>() - 2.0 / 27.0) <= 1e-10);
    CHECK(std::abs(j["kappa_q_sq"].get<double>() - 8.0 / 27.0) <= 1e-10);
}
