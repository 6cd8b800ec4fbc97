#include <doctest.h>

#include "mas/cli.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Result r;
    r.code = mas::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json run_json(std::vector<std::string> args, int expected_code) {
    args.push_back("--json");
    const auto r = run(args);
    CHECK(r.code == expected_code);
    return json::parse(r.out);
}

struct SeedGuard {
    SeedGuard() { unsetenv("MAS_SEED"); }
    ~SeedGuard() { unsetenv("MAS_SEED"); }
};

}  // namespace

TEST_CASE("exit codes over a fixture matrix") {
    SeedGuard g;
    struct Case {
        std::vector<std::string> args;
        int code;
    };
    const std::vector<Case> cases{
        {{"classify", "--psi", "(x1^2+x2^2)/2", "--at", "0,0"}, 0},
        {{"classify", "--a", "0"}, 0},
        {{"classify", "--psi", "x1", "--a", "1"}, 2},
        {{"classify", "--psi", "x1*", "--at", "0,0"}, 2},
        {{"classify", "--psi", "x1*x2", "--at", "0,zero"}, 2},
        {{"classify", "--psi", "x1*x2", "--at", "0,0,0"}, 2},
        {{"triple", "--a", "1"}, 0},
        {{"triple", "--a", "1 + x1^2"}, 0},
        {{"triple", "--a", "-2"}, 1},
        {{"triple", "--a", "x1"}, 1},
        {{"triple", "--a", "x9"}, 2},
        {{"hitchin", "--structure", "hess1"}, 0},
        {{"hitchin", "--structure", "speciallag"}, 0},
        {{"hitchin", "--structure", "burgers-cy", "--a", "x1^2"}, 0},
        {{"hitchin", "--structure", "euler3d-pair"}, 1},
        {{"hitchin", "--structure", "nope"}, 2},
        {{"hitchin"}, 2},
        {{"reduce", "--action", "laplace3d"}, 0},
        {{"reduce", "--action", "euler-pair", "--a", "sin(x1)*cos(x2)", "--gamma", "2"}, 0},
        {{"reduce", "--action", "burgers", "--a", "1"}, 1},
        {{"reduce", "--action", "spin"}, 2},
        {{"burgers", "--gamma", "2", "--psi", "x1^2+x2^2", "--dp", "2", "--c", "0"}, 0},
        {{"burgers", "--gamma", "2", "--psi", "x1^2+x2^2", "--dp", "0"}, 1},
        {{"burgers", "--gamma", "2", "--psi", "x1^2+x2^2"}, 2},
        {{"curvature", "--metric", "burgers-cy", "--a", "x1^2"}, 0},
        {{"curvature", "--metric", "burgers-cy", "--a", "x1^2", "--require", "flat"}, 1},
        {{"curvature", "--metric", "burgers-cy", "--a", "2*x1+1", "--require", "flat"}, 0},
        {{"curvature", "--require", "maybe"}, 2},
        {{"grid", "--u", "-x2;x1", "--axes", "-1:1:16,-1:1:16"}, 0},
        {{"grid", "--u", "x1;x2", "--axes", "-1:1:16,-1:1:16"}, 1},
        {{"grid", "--u", "x1;x2", "--axes", "-1:1"}, 2},
        {{"grid", "--input", "/nonexistent/grid.csv"}, 2},
        {{"grid"}, 2},
        {{"bogus"}, 2},
        {{}, 2},
        {{"--samples", "0", "triple"}, 2},
    };
    for (const auto& c : cases) {
        std::string joined;
        for (const auto& a : c.args) joined += a + " ";
        CAPTURE(joined);
        CHECK(run(c.args).code == c.code);
    }
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("JSON envelope") {
    SeedGuard g;
    const auto j = run_json({"triple", "--a", "1"}, 0);
    CHECK(j["report_version"] == 1);
    CHECK(j["command"] == "triple");
    CHECK(j["seed"] == 42);
    CHECK(j["samples"] == 100);
    CHECK(j["verdict"] == "pass");
    REQUIRE(j["reports"].size() == 2);
    for (const auto& r : j["reports"]) {
        CHECK(r.contains("residuals"));
        CHECK(r["residuals"].contains("argmax_point"));
        CHECK(r["per_check"].is_array());
    }
}

TEST_CASE("error envelope carries stage and offset") {
    SeedGuard g;
    const auto j = run_json({"triple", "--a", "x1 + * 2"}, 2);
    CHECK(j["verdict"] == "error");
    CHECK(j["error"]["stage"] == "parse");
    CHECK(j["error"]["offset"] == 5);
    const auto k = run_json({"hitchin", "--structure", "nope"}, 2);
    CHECK(k["error"]["stage"] == "input");
    CHECK_FALSE(k["error"].contains("offset"));
    const auto human = run({"triple", "--a", "x1 + * 2"});
    CHECK(human.out.empty());
    CHECK(human.err.find("error (parse)") != std::string::npos);
}

TEST_CASE("reports are deterministic and seeded") {
    SeedGuard g;
    const std::vector<std::string> args{"hitchin", "--structure", "burgers-cy", "--a", "x1*x2", "--json"};
    const auto a = run(args), b = run(args);
    CHECK(a.out == b.out);
    auto with_seed = args;
    with_seed.insert(with_seed.begin(), {"--seed", "7"});
    const auto c = run(with_seed);
    CHECK(c.out != a.out);
    CHECK(json::parse(c.out)["seed"] == 7);

    setenv("MAS_SEED", "7", 1);
    const auto d = run(args);
    CHECK(d.out == c.out);
    // An explicit flag beats the environment.
    auto flag42 = args;
    flag42.insert(flag42.begin(), {"--seed", "42"});
    CHECK(run(flag42).out == a.out);
    setenv("MAS_SEED", "seven", 1);
    CHECK(run(args).code == 2);
}

TEST_CASE("classification") {
    SeedGuard g;
    auto j = run_json({"classify", "--psi", "(x1^2+x2^2)/2", "--at", "0,0"}, 0);
    CHECK(j["points"][0]["class"] == "elliptic");
    j = run_json({"classify", "--psi", "x1*x2", "--at", "0,0"}, 0);
    CHECK(j["points"][0]["class"] == "hyperbolic");
    j = run_json({"classify", "--a", "0"}, 0);
    CHECK(j["points"][0]["class"] == "degenerate");
    j = run_json({"classify", "--a", "x1", "--grid", "-1:1:5,0:1:3"}, 0);
    CHECK(j["points"].size() == 15);
    CHECK(j["counts"]["elliptic"] == 6);
    CHECK(j["counts"]["hyperbolic"] == 6);
    CHECK(j["counts"]["degenerate"] == 3);
}

TEST_CASE("selftest") {
    SeedGuard g;
    const auto j = run_json({"selftest"}, 1);
    std::vector<std::string> failing;
    for (const auto& v : j["vectors"])
        if (!v["pass"].get<bool>()) failing.push_back(v["name"]);
    // The three recorded discrepancies, and nothing else.
    CHECK(failing == std::vector<std::string>{"triple relations, a = -2", "Euler pair relations",
                                              "Burgers decomposition"});
    const auto k = run_json({"selftest", "--inject-fault"}, 1);
    CHECK(k["vectors"][0]["pass"] == false);
}

TEST_CASE("reduce and burgers outputs") {
    SeedGuard g;
    auto j = run_json({"reduce", "--action", "laplace3d"}, 0);
    CHECK(j["omega_c"] == "1*dx1^dxi2 + (-1)*dx2^dxi1");
    j = run_json({"burgers", "--gamma", "2", "--psi", "x1^2+x2^2", "--dp", "0"}, 1);
    CHECK(j["reports"][0]["details"]["failed_stage"] == "(i)");
    CHECK(j["reports"][0]["per_check"][0]["residual"].get<double>() == doctest::Approx(1.0));
    j = run_json({"burgers", "--gamma", "2", "--psi", "x1^2+x2^2", "--dp", "2", "--c", "0"}, 0);
    CHECK(j["reports"][0]["per_check"].size() == 4);
}

TEST_CASE("grid through files and tolerance override") {
    SeedGuard g;
    const std::string path = "cli_grid_test.csv";
    auto j = run_json({"grid", "--u", "-sin(x1)*cos(x2);cos(x1)*sin(x2)", "--axes", "0:6.283185307179586:32,0:6.283185307179586:32",
                       "--write", path},
                      0);
    const auto k = run_json({"grid", "--input", path, "--full"}, 0);
    CHECK(k["summary"] == j["summary"]);
    CHECK(k["nodes"].size() == 28 * 28);
    std::remove(path.c_str());

    // A tiny tolerance makes the identity checks fail.
    CHECK(run({"--tol", "1e-300", "triple", "--a", "1 + x1^2"}).code == 1);
    const std::string out = "cli_report_test.json";
    CHECK(run({"--output", out, "--json", "triple", "--a", "1"}).code == 0);
    std::ifstream f(out);
    CHECK(json::parse(f)["verdict"] == "pass");
    std::remove(out.c_str());
}
