#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvelab/cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "lvelab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = lvelab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("forests --n 4 --trees-only lists 16 trees") {
    const auto r = run({"forests", "--n", "4", "--trees-only"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["count"] == 16);
    CHECK(j["result"]["forests"].size() == 16);
    CHECK(j["config"]["command"] == "forests");
    CHECK(j["config"]["n"] == 4);
}

TEST_CASE("series --order 1 prints the planar row") {
    const auto r = run({"series", "--order", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "order 1: −2·N²\n");
    const auto csv = run({"--format", "csv", "series", "--order", "2"});
    CHECK(csv.out == "order,N_power,coefficient\n1,2,-2/1\n2,2,9/1\n2,0,1/1\n");
}

TEST_CASE("lve report embeds the config and the oracle comparison") {
    const auto r = run({"lve", "--lambda", "0.05", "--N", "1", "--orders", "3", "--seed", "42"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["config"]["seed"] == 42);
    CHECK(j["config"]["lambda"] == 0.05);
    CHECK(j["config"]["integrator"]["kind"] == "quadrature");
    CHECK(j["result"]["orders"].size() == 3);
    CHECK(j["result"]["oracle"]["value"].is_number());
    CHECK_FALSE(j["config"].contains("jobs"));
}

TEST_CASE("identical runs give identical bytes whatever the worker count") {
    const std::vector<std::string> args{"lve", "--lambda", "0.05", "--N", "2", "--orders", "3", "--samples", "4000"};
    const auto a = run(args);
    auto with_jobs = args;
    with_jobs.insert(with_jobs.begin(), {"--jobs", "3"});
    const auto b = run(with_jobs);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto other_seed = args;
    other_seed.insert(other_seed.begin(), {"--seed", "7"});
    CHECK(run(other_seed).out != a.out);
}

TEST_CASE("exit codes") {
    CHECK(run({"forests", "--n", "4", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"forests"}).code == 2);
    CHECK(run({"forests", "--n", "12"}).code == 2);
    CHECK(run({"series", "--order", "9"}).code == 2);
    CHECK(run({"lve", "--lambda", "-1"}).code == 2);
    CHECK(run({"lve", "--lambda", "0.1", "--N", "2", "--integrator", "quadrature"}).code == 2);
    CHECK(run({"--format", "xml", "forests", "--n", "2"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    const auto bad = run({"ribbon", "--n", "1", "--pair", "1:3", "--pair", "2:4"});
    CHECK(bad.code == 1);
    const auto record = nlohmann::json::parse(bad.out);
    CHECK(record["error"]["kind"] == "invalid_pairing");

    const auto strict = run({"lve", "--lambda", "0.05", "--orders", "3", "--abs-tol", "1e-15", "--rel-tol", "1e-15"});
    CHECK(strict.code == 1);
    CHECK(nlohmann::json::parse(strict.out)["error"]["kind"] == "accuracy");
}

TEST_CASE("compare, oracle, ribbon and propagator subcommands") {
    const auto cmp = run({"compare", "--order", "3"});
    CHECK(cmp.code == 0);
    CHECK(cmp.out.find("series agree exactly through order 3") != std::string::npos);

    const auto z = nlohmann::json::parse(run({"oracle", "--lambda", "1"}).out);
    CHECK(std::abs(z["result"]["Z"]["value"].get<double>() - 0.5456413607650471) < 1e-10);

    const auto g = nlohmann::json::parse(run({"ribbon", "--n", "1", "--pair", "1:2", "--pair", "3:4"}).out);
    CHECK(g["result"]["invariants"]["faces"] == 3);
    CHECK(g["result"]["divergence"]["omega"] == 4);

    const auto census = nlohmann::json::parse(run({"ribbon", "--n", "2", "--census"}).out);
    CHECK(census["result"]["connected"] == 20);

    const auto p = nlohmann::json::parse(run({"propagator", "--omega", "1", "--A", "1", "--size", "3"}).out);
    CHECK(p["result"]["spec"]["class"] == "self-dual");
    CHECK(p["result"]["kernel"][1][2] == 0.25);
    const auto ord = nlohmann::json::parse(run({"propagator", "--omega", "0.5"}).out);
    CHECK(ord["result"]["kernel"].is_null());
    CHECK(run({"propagator", "--class", "self-dual", "--omega", "0.5"}).code == 2);
}

TEST_CASE("compare reads series files and flags a mismatch with exit 1") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto good = (dir / "lvelab_cli_series.json").string();
    const auto report = (dir / "lvelab_cli_report.json").string();
    CHECK(run({"--format", "json", "--output", good, "series", "--order", "3"}).code == 0);
    CHECK(run({"compare", "--order", "3", "--a", good, "--b", "wick"}).code == 0);

    std::ifstream in(good);
    auto j = nlohmann::json::parse(in);
    j["result"]["series"][2]["terms"][1]["coefficient"] = "-77/3";
    std::ofstream(report) << j.dump();
    const auto diff = run({"--format", "json", "compare", "--order", "3", "--a", report});
    CHECK(diff.code == 1);
    CHECK(nlohmann::json::parse(diff.out)["result"]["first_divergence"]["order"] == 3);
    CHECK(run({"compare", "--a", "/nonexistent/file.json"}).code == 2);
    std::filesystem::remove(good);
    std::filesystem::remove(report);
}
