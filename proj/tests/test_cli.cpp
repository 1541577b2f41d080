#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>

#include "hdyn/json_io.hpp"
#include "hurwitz_fixtures.hpp"

using namespace hdyn;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(HDYN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string data(const std::string& f) { return std::string(HDYN_DATA_DIR) + "/" + f; }

} // namespace

TEST(Cli, HomologyDims) {
    auto r = run("homology dims --n 6");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(Json::parse(r.out), Json::parse(R"({"k_dims": {"0": 1, "1": 16, "2": 16, "3": 1}})"));
}

TEST(Cli, HurwitzCount) {
    auto r = run("hurwitz count --data " + data("fig1.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(Json::parse(r.out), Json::parse(R"({"deg_pi_B": 4, "deg_nu": 1})"));
    auto d2 = Json::parse(run("hurwitz count --data " + data("d2_b4.json")).out);
    EXPECT_EQ(d2["deg_pi_B"], 2);
}

TEST(Cli, DynamicalDegreeH0) {
    auto r = run("dyndeg --data " + data("fig1_self.json") + " --k 0");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(Json::parse(r.out), Json::parse(R"({"theta": 4, "method": "exact_roots"})"));
}

TEST(Cli, ExitCodes) {
    auto bad = run("hurwitz count --data /nonexistent.json");
    EXPECT_EQ(bad.code, 2);
    EXPECT_TRUE(Json::parse(bad.out).contains("error"));
    EXPECT_EQ(run("strata --n 5").code, 2);
    EXPECT_EQ(run("homology dims --n 10").code, 3);
    EXPECT_EQ(run("hurwitz count --data " + data("fig1.json") + " --limit-tuples 3").code, 3);
    EXPECT_EQ(run("--limit-tuples 3 hurwitz count --data " + data("fig1.json")).code, 3);
    EXPECT_EQ(run("bogus").code, 2);
}

TEST(Cli, Deterministic) {
    for (const std::string& args : {std::string("strata --n 6 --k 1"), "hurwitz types --data " + data("fig1.json") +
                                                                          " --tau " + data("tau_b12_b34.json"),
                                    "pushforward --data " + data("n5_d2_self.json") + " --k 1"}) {
        auto a = run(args), b = run(args);
        EXPECT_EQ(a.code, 0) << args;
        EXPECT_EQ(a.out, b.out) << args;
    }
}

TEST(Cli, TypesAndKernel) {
    auto t = Json::parse(run("hurwitz types --data " + data("fig1.json") + " --tau " + data("tau_b12_b34.json")).out);
    EXPECT_EQ(t["degree_check"], true);
    EXPECT_EQ(t["sum_m_count"], 4);
    auto k = Json::parse(run("hassett kernel --n 6 --k 2 --weights " + data("weights_n6_dagger.json")).out);
    EXPECT_EQ(k["kernel_dim"], 10);
    EXPECT_EQ(k["equals_lambda_less"], true);
    auto v = Json::parse(run("hurwitz validate --data " + data("fig1.json")).out);
    EXPECT_EQ(v["status"], "Plain");
}

TEST(Cli, BlocksFromMatrixFile) {
    auto r = run("blocks --matrix " + data("identity16.json") + " --n 6 --k 2");
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["preserved"], true);
    EXPECT_EQ(j["omega_dim"], 6);
    EXPECT_EQ(j["lambda_dim"], 10);
}

TEST(JsonIo, StratumRoundTrip) {
    for (int n = 4; n <= 7; ++n)
        for (const auto& s : all_strata(n)) EXPECT_EQ(stratum_from_json(stratum_to_json(s)), s);
    EXPECT_THROW(stratum_from_json(Json::parse(R"({"n": 4, "parents": [-1, 0], "legs": {"1": 0, "2": 0, "3": 0, "4": 1}})")),
                 ValidationError);
}

TEST(JsonIo, HurwitzRoundTrip) {
    auto h = hurwitz_from_json(read_json_file(data("fig1_self.json")));
    auto ref = fixtures::cubic_four_point_self();
    EXPECT_EQ(h.A, ref.A);
    EXPECT_EQ(h.F, ref.F);
    EXPECT_EQ(h.rm, ref.rm);
    EXPECT_EQ(h.br, ref.br);
    EXPECT_EQ(h.identify, ref.identify);
    auto again = hurwitz_from_json(hurwitz_to_json(h));
    EXPECT_EQ(again.F, h.F);
    EXPECT_EQ(again.identify, h.identify);
    EXPECT_THROW(hurwitz_from_json(Json::parse(R"({"A": ["a"], "B": ["b"], "d": 1, "F": {"a": "c"}, "br": {}, "rm": {}})")),
                 ValidationError);
}

TEST(JsonIo, FractionMatrices) {
    Matrix m{{Rational(1, 2), Rational(-3)}, {Rational(0), Rational(7, 3)}};
    EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
    EXPECT_EQ(matrix_from_json(Json::parse(R"([[1, "2/4"], ["-1/3", 0]])"))[0][1], Rational(1, 2));
}
