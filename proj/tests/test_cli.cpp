#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"
#include "truncdim/truncdim.hpp"

#ifndef TRUNCDIM_CLI_PATH
#error "TRUNCDIM_CLI_PATH must point at the built CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(TRUNCDIM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("dim csv schema and the p=1 table cell", "[cli]") {
    const auto r = run_cli("--format csv dim --alpha 2 --p 1 --c1 1 --eps 1e-2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("p,alpha,epsilon,dim_trnc,bound_at_k,bound_at_k_minus_1") == 0);
    CHECK(r.out.find("1,2,0.01,9,") != std::string::npos);
}

TEST_CASE("dim with huge epsilon clamps to one variable", "[cli]") {
    const auto r = run_cli("--format csv dim --gamma 1,0.5 --p 2 --c1 1 --eps 10");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find(",10,1,") != std::string::npos);  // eps=10 -> dim 1
    CHECK(r.out.find("inf") != std::string::npos);     // no rejected predecessor
}

TEST_CASE("dim emits the p=2 table row", "[cli]") {
    const auto r = run_cli("--format csv dim --alpha 3 --p 2 --c1 1 --eps 1e-1..1e-3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("2,3,0.1,2,") != std::string::npos);
    CHECK(r.out.find("2,3,0.01,5,") != std::string::npos);
    CHECK(r.out.find("2,3,0.001,13,") != std::string::npos);
}

TEST_CASE("error command branches", "[cli]") {
    const auto p1 = run_cli("error --alpha 3 --p 1 --c1 1 --k 4");
    CHECK(p1.exit_code == 0);
    CHECK(p1.out.find("0.008") != std::string::npos);

    const auto table = run_cli("error --alpha 2 --p 2 --c1 1 --k 90");
    CHECK(table.exit_code == 0);

    const auto exact = run_cli("--verify error --gamma 1,0.5,0.25 --exact --k 2 --pstar 2");
    CHECK(exact.exit_code == 0);
    CHECK(exact.out.find("exact-subset-sum") != std::string::npos);
}

TEST_CASE("constant command and exactness tags", "[cli]") {
    const auto a = run_cli(
        "constant --kernel anchored-step --density uniform --problem approx --q 2 --p1 2");
    CHECK(a.exit_code == 0);
    CHECK(a.out.find("0.707106781187") != std::string::npos);
    CHECK(a.out.find("exact") != std::string::npos);

    const auto inf = run_cli(
        "constant --kernel polyexp --r 1 --lambda -1 --density exp --mu 0.5 "
        "--problem approx --q 2 --p1 1");
    CHECK(inf.exit_code == 0);
    CHECK(inf.out.find("inf") != std::string::npos);

    const auto inf3 = run_cli(
        "--require-finite constant --kernel polyexp --r 1 --lambda -1 --density exp "
        "--mu 0.5 --problem approx --q 2 --p1 1");
    CHECK(inf3.exit_code == 3);

    const auto half = run_cli(
        "constant --kernel polyexp --r 2 --lambda 0 --density exp --mu 2 --problem int "
        "--p1 1");
    CHECK(half.exit_code == 0);
    CHECK(half.out.find("0.5") != std::string::npos);

    const auto verified = run_cli(
        "--verify constant --kernel polyexp --r 2 --lambda 0 --density exp --mu 1 "
        "--problem approx --q 2 --p1 1");
    CHECK(verified.exit_code == 0);
    CHECK(verified.out.find("verify") != std::string::npos);
}

TEST_CASE("embedding command", "[cli]") {
    const auto corner = run_cli("embedding --alpha 2 --s 3 --m1 1 --p1 1 --p2 1");
    CHECK(corner.exit_code == 0);
    CHECK(corner.out.find("2.77777777778") != std::string::npos);

    const auto zero = run_cli("embedding --alpha 2 --s 3 --m1 0 --p1 1 --p2 1");
    CHECK(zero.exit_code == 0);
    CHECK(zero.out.find("= 1 ") != std::string::npos);

    const auto interp = run_cli("embedding --p1 2 --p2 2 --m1 1 --minf 3 --gamma 1");
    CHECK(interp.exit_code == 0);
    CHECK(interp.out.find("2.82842712475") != std::string::npos);
    CHECK(interp.out.find("upper-bound") != std::string::npos);

    const auto verified = run_cli("--verify embedding --alpha 2 --s 3 --m1 1 --p1 1 --p2 1");
    CHECK(verified.exit_code == 0);
    CHECK(verified.out.find("deviation") != std::string::npos);
}

TEST_CASE("gamma-file weights drive the exact path and match the oracle", "[cli]") {
    const std::string path = "/tmp/truncdim_test_weights.json";
    {
        std::ofstream f(path);
        f << R"({"s": 3, "entries": [
            {"u": [1], "gamma": 1.0},
            {"u": [2], "gamma": 0.5},
            {"u": [3], "gamma": 0.25},
            {"u": [1,2], "gamma": 0.5},
            {"u": [1,3], "gamma": 0.25},
            {"u": [2,3], "gamma": 0.125},
            {"u": [1,2,3], "gamma": 0.125}]})";
    }
    // --verify cross-checks trunc_bound_general against subset_sum_oracle
    const auto r = run_cli("--verify --format json error --gamma-file " + path +
                           " --exact --k 2 --pstar 2");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("result").at("kind").get<std::string>() == "exact-subset-sum");
    // subsets not within [2]: {3},{1,3},{2,3},{1,2,3} with squared weights
    const double expect = std::sqrt(0.25 * 0.25 + 0.25 * 0.25 + 0.125 * 0.125 + 0.125 * 0.125);
    CHECK(std::abs(j.at("result").at("bound").get<double>() - expect) < 1e-12);

    const auto prod = run_cli("--format csv dim --gamma-file " + path + " --p 1 --eps 0.2");
    CHECK(prod.exit_code == 0);
    std::remove(path.c_str());
}

TEST_CASE("reproduce passes with the documented threshold policy", "[cli]") {
    const auto r = run_cli("reproduce");
    CHECK(r.exit_code == 0);

    const auto csv = run_cli("--format csv reproduce");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.find("p,alpha,epsilon,dim_trnc") == 0);
    int rows = 0;
    for (char c : csv.out) rows += c == '\n';
    CHECK(rows == 49);  // header + 48 cells
}

TEST_CASE("json output round-trips through recomputation", "[cli]") {
    const auto r = run_cli("--format json dim --alpha 3 --p 2 --c1 1 --eps 1e-2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.at("cells").size() == 1);
    const auto& cell = j.at("cells").at(0);
    CHECK(cell.at("dim_trnc").get<std::int64_t>() == 5);

    // recompute from the echoed config; the emitted numbers must agree at
    // the full printed precision
    const double p = j.at("config").at("p").get<double>();
    const double tol = j.at("config").at("tol").get<double>();
    const double alpha = cell.at("alpha").get<double>();
    const double eps = cell.at("epsilon").get<double>();
    const auto res = truncdim::truncation_dimension(
        truncdim::ProductWeights::polynomial(alpha), 1.0, eps, truncdim::Exponent(p), tol);
    CHECK(res.k_star == cell.at("dim_trnc").get<std::uint64_t>());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", res.bound_at_k_star);
    CHECK(std::strtod(buf, nullptr) == cell.at("bound_at_k").get<double>());

    const auto c = run_cli(
        "--format json constant --kernel polyexp --r 2 --lambda 0 --density exp --mu 2 "
        "--problem int --p1 1");
    REQUIRE(c.exit_code == 0);
    const auto cj = nlohmann::json::parse(c.out);
    CHECK(cj.at("result").at("value").get<double>() == 0.5);
    CHECK(cj.at("result").at("exactness").get<std::string>() == "exact");
}

TEST_CASE("config file provides defaults, flags win", "[cli]") {
    const std::string cfg_path = "/tmp/truncdim_test_config.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "format=json\n";
    }
    const auto r = run_cli("--config " + cfg_path + " dim --alpha 3 --p 1 --c1 1 --eps 1e-2");
    CHECK(r.exit_code == 0);
    CHECK_NOTHROW(nlohmann::json::parse(r.out));  // config switched output to json

    const auto over = run_cli("--config " + cfg_path +
                              " --format csv dim --alpha 3 --p 1 --c1 1 --eps 1e-2");
    CHECK(over.exit_code == 0);
    CHECK(over.out.find("p,alpha,") == 0);  // flag beats config
    std::remove(cfg_path.c_str());
}

TEST_CASE("usage errors exit with code 1", "[cli]") {
    CHECK(run_cli("dim --alpha 2 --no-such-flag").exit_code == 1);
    CHECK(run_cli("error --alpha 2 --k 1").exit_code == 1);     // needs --p or --pstar
    CHECK(run_cli("dim --eps 1e-2").exit_code == 1);            // no weights given
    CHECK(run_cli("dim --alpha 2 --gamma 1,0.5 --eps 1e-2").exit_code == 1);
    CHECK(run_cli("constant --kernel bogus --problem approx").exit_code == 1);
}
