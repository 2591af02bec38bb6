#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "oplens/cli/commands.hpp"
#include "oplens/cli/matrix_io.hpp"
#include "oplens/cli/report.hpp"
#include "oplens/generators.hpp"
#include "oplens/numrange.hpp"
#include "test_util.hpp"

using namespace oplens;
using namespace oplens::cli;
using namespace oplens::testing;

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
    [[nodiscard]] Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args, Environment env = {}) {
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(args, out, err, env);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("oplens_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string write_matrix(const std::string& name, const ComplexMatrix& m) {
        return write(name, serialize_matrix(m));
    }
    std::string catalog_file(const std::string& label) {
        for (const auto& e : catalog()) {
            if (e.label == label) return write_matrix(label + ".json", e.matrix);
        }
        ADD_FAILURE() << "no catalog entry " << label;
        return {};
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::string read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(MatrixIo, RoundTripIsBitExact) {
    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        ComplexMatrix m = random_matrix(1 + trial % 6, rng);
        m(0, 0) = Complex(1e-310, -0.1);  // subnormal
        if (m.rows() > 1) m(1, 0) = Complex(1e300, 1.0 / 3.0);
        const ComplexMatrix back = parse_matrix(serialize_matrix(m));
        ASSERT_EQ(back.rows(), m.rows());
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            EXPECT_EQ(std::memcmp(&back.data()[i], &m.data()[i], sizeof(Complex)), 0);
        }
    }
}

TEST(MatrixIo, RejectsMalformedDocuments) {
    for (const char* text : {"", "not json", "{\"dim\": 2}", "{\"dim\": 2, \"data\": [[[1,0],[0,0]]]}",
                             "{\"dim\": 1, \"data\": [[[1]]]}", "{\"dim\": 1, \"data\": [[[1, \"x\"]]]}",
                             "{\"dim\": 0, \"data\": []}", "{\"dim\": 1, \"data\": [[1, 0]]}"}) {
        EXPECT_THROW((void)parse_matrix(text), ParseError) << text;
    }
    EXPECT_THROW((void)read_matrix_file("/nonexistent/oplens/file.json"), ParseError);
}

TEST_F(CliTest, ClassifyExamples) {
    const CliRun root = run({"classify", catalog_file("sixth_root_scalar")});
    ASSERT_EQ(root.code, 0) << root.err;
    const Json j = root.json();
    EXPECT_FALSE(j["classes"]["positive"]["holds"].get<bool>());
    EXPECT_TRUE(j["classes"]["accretive"]["holds"].get<bool>());
    EXPECT_EQ(j["tool"], "oplens");
    EXPECT_EQ(j["tolerance"]["atol"].get<double>(), 1e-10);

    const CliRun d = run({"classify", write_matrix("d.json", diag({1.0, 2.0}))});
    ASSERT_EQ(d.code, 0);
    EXPECT_EQ(d.json()["classes"].size(), 7u);
    for (const auto& [name, entry] : d.json()["classes"].items()) {
        EXPECT_TRUE(entry["holds"].get<bool>()) << name;
        // Every flag carries its residual.
        EXPECT_TRUE(entry.contains("residual")) << name;
    }
}

TEST_F(CliTest, ErrorExitCodes) {
    EXPECT_EQ(run({"classify", write("bad.json", "{\"dim\": 2}")}).code, kExitUsage);
    EXPECT_EQ(run({"classify", path("missing.json")}).code, kExitUsage);
    EXPECT_EQ(run({"classify"}).code, kExitUsage);
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"classify", write("nan.json", "{\"dim\":1,\"data\":[[[1e999,0]]]}")}).code, kExitUsage);

    const std::string big = write_matrix("big.json", identity(5));
    const CliRun r = run({"--max-dim", "4", "classify", big});
    EXPECT_EQ(r.code, kExitTooLarge);
    EXPECT_NE(r.err.find("oplens:"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

    EXPECT_EQ(run({"verify", "no_such_result", big}).code, kExitDomain);
    EXPECT_EQ(run({"verify", "coprime_powers_normal", big, "--p", "2", "--q", "4"}).code, kExitDomain);
    EXPECT_EQ(run({"fuzz", "2", "4", "--trials", "3"}).code, kExitDomain);
    EXPECT_EQ(run({"gen", "no_such_class"}).code, kExitDomain);
    EXPECT_EQ(run({"--tol", "-1", "classify", big}).code, kExitDomain);
}

TEST_F(CliTest, HelpExitsZero) {
    const CliRun r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("certify"), std::string::npos);
}

TEST_F(CliTest, CertifyExamples) {
    const CliRun sh = run({"certify", catalog_file("shear")});
    EXPECT_EQ(sh.code, kExitNegative);
    EXPECT_EQ(sh.json()["certificate"]["violation_k"], 2);
    EXPECT_EQ(sh.json()["certificate"]["violation_direction"].size(), 2u);

    EXPECT_EQ(run({"certify", catalog_file("psd2")}).code, kExitOk);

    const CliRun root = run({"certify", catalog_file("sixth_root_scalar")});
    EXPECT_EQ(root.code, kExitNegative);
    EXPECT_EQ(root.json()["certificate"]["violation_k"], 1);
}

TEST_F(CliTest, TolerancePrecedence) {
    const std::string f = catalog_file("psd2");
    Environment env;
    env.tol = "1e-6";
    EXPECT_EQ(run({"classify", f}, env).json()["tolerance"]["atol"].get<double>(), 1e-6);
    EXPECT_EQ(run({"--tol", "1e-3", "classify", f}, env).json()["tolerance"]["atol"].get<double>(), 1e-3);
    // Global flags may follow the subcommand.
    EXPECT_EQ(run({"classify", f, "--tol", "1e-4"}, env).json()["tolerance"]["atol"].get<double>(), 1e-4);
    const CliRun k = run({"--kmax", "32", "--grid", "90", "--rtol", "0", "classify", f});
    EXPECT_EQ(k.json()["tolerance"]["max_power"], 32);
    EXPECT_EQ(k.json()["tolerance"]["angle_grid"], 90);
    env.tol = "abc";
    EXPECT_EQ(run({"classify", f}, env).code, kExitUsage);
}

TEST_F(CliTest, DecomposeExamples) {
    const CliRun j = run({"decompose", catalog_file("jordan2")});
    ASSERT_EQ(j.code, kExitOk) << j.err;
    const Json d = j.json()["decomposition"];
    EXPECT_EQ(d["a_dim"], 0);
    EXPECT_EQ(d["b_dim"], 1);
    EXPECT_LE(d["residual"].get<double>(), 1e-12);

    const CliRun refused = run({"decompose", write_matrix("t.json", mat2(1, 1, 0, 2))});
    EXPECT_EQ(refused.code, kExitNegative);
    EXPECT_EQ(refused.json()["refused"]["code"], "SquareNotNormal");
    EXPECT_TRUE(refused.json()["decomposition"].is_null());
}

TEST_F(CliTest, VerifyEchoesParameters) {
    const CliRun r = run({"verify", "positivity_equivalences", catalog_file("psd2"), "--k0", "4"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Json v = r.json()["verdict"];
    EXPECT_TRUE(v["consistent"].get<bool>());
    EXPECT_TRUE(v["conclusion"]["holds"].get<bool>());
    EXPECT_EQ(v["params"]["k0"], 4);
    EXPECT_EQ(v["params"]["k_max"], 64);

    const CliRun c = run({"verify", "coprime_powers_normal", catalog_file("jordan2")});
    EXPECT_EQ(c.code, kExitOk);
    EXPECT_FALSE(c.json()["verdict"]["conclusion"]["holds"].get<bool>());
}

TEST_F(CliTest, NrangeEmitsTwoColumns) {
    const CliRun r = run({"nrange", catalog_file("jordan2"), "--points", "12"});
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        double re = 0.0, im = 0.0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf %lf", &re, &im), 2) << line;
        EXPECT_NEAR(std::hypot(re, im), 0.5, 1e-9);
        ++rows;
    }
    EXPECT_EQ(rows, 12);
    EXPECT_EQ(run({"nrange", catalog_file("jordan2"), "--points", "2"}).code, kExitDomain);
}

TEST_F(CliTest, FuzzWritesLogAndSummary) {
    const std::string log = path("fuzz.log");
    const CliRun r = run({"fuzz", "2", "3", "--trials", "1000", "--seed", "7", "--log", log});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.json()["candidates"], 0);
    EXPECT_EQ(r.json()["trials"], 1000);
    const std::string text = read(log);
    EXPECT_NE(text.find("summary trials=1000 candidates=0"), std::string::npos);

    const CliRun inline_log = run({"fuzz", "2", "3", "--trials", "1000", "--seed", "7"});
    EXPECT_EQ(inline_log.out, text);
}

TEST_F(CliTest, GenThenClassifyKeepsTheContract) {
    struct Case {
        const char* cls;
        const char* flag;
    };
    for (const Case c : {Case{"normal", "normal"}, Case{"psd", "positive"}, Case{"self_adjoint", "self_adjoint"},
                         Case{"accretive", "accretive"}, Case{"unitary", "normal"}}) {
        for (const char* seed : {"1", "2", "3"}) {
            const std::string f = path(std::string(c.cls) + seed + ".json");
            ASSERT_EQ(run({"gen", c.cls, "--dim", "5", "--seed", seed, "--scale", "2.5", "--out", f}).code, 0);
            const CliRun r = run({"classify", f});
            ASSERT_EQ(r.code, 0) << r.err;
            EXPECT_TRUE(r.json()["classes"][c.flag]["holds"].get<bool>()) << c.cls << " " << seed;
        }
    }
    const CliRun stdout_gen = run({"gen", "generic", "--dim", "3", "--seed", "9"});
    GenSpec spec;
    spec.cls = GenClass::generic;
    spec.dim = 3;
    spec.seed = 9;
    EXPECT_EQ(parse_matrix(stdout_gen.out), generate(spec));
    EXPECT_EQ(run({"gen", "generic", "--dim", "17"}).code, kExitTooLarge);
}

TEST_F(CliTest, ReportsAreByteStable) {
    const std::string f = catalog_file("shear");
    for (const char* cmd : {"classify", "certify", "decompose"}) {
        EXPECT_EQ(run({cmd, f}).out, run({cmd, f}).out) << cmd;
    }
    EXPECT_EQ(run({"verify", "dyadic_sector", f}).out, run({"verify", "dyadic_sector", f}).out);
}

TEST_F(CliTest, CatalogAndTheoremListings) {
    const CliRun labels = run({"catalog"});
    EXPECT_NE(labels.out.find("sixth_root_scalar\n"), std::string::npos);
    const CliRun ids = run({"theorems"});
    EXPECT_EQ(std::count(ids.out.begin(), ids.out.end(), '\n'), 15);
    EXPECT_EQ(run({"catalog", "nope"}).code, kExitDomain);
}

TEST_F(CliTest, BinaryRunsEndToEnd) {
    const std::string f = path("g.json");
    const std::string cmd = std::string(OPLENS_TOOL_PATH) + " gen sqrt_of_normal --dim 6 --seed 4 --out " + f +
                            " && " + OPLENS_TOOL_PATH + " decompose " + f + " > " + path("out.json");
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    const Json d = Json::parse(read(path("out.json")));
    EXPECT_EQ(d["decomposition"]["a_dim"].get<int>() + 2 * d["decomposition"]["b_dim"].get<int>(), 6);
    const std::string certify = std::string(OPLENS_TOOL_PATH) + " certify " + catalog_file("shear") + " > /dev/null";
    const int status = std::system(certify.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 1);
}
