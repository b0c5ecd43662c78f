#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "config.hpp"
#include "fslab/errors.hpp"
#include "report.hpp"

using namespace fslab;
using namespace fslab::cli;
namespace fs = std::filesystem;

namespace {

const char* kSmallSolve = R"([fluid]
mu = 1
[sector]
zeta_case = C3
[grid]
tangential_points = 32  ; small grid
normal_nodes = 32
[solve]
lambda_re = 4
lambda_im = 1
)";

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("fslab_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text) const {
        const auto p = path / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FSLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_report(const fs::path& dir) {
    std::ifstream is(dir / "report.json");
    return json::parse(is);
}

}  // namespace

TEST(Config, ParsesSectionsAndInlineComments) {
    const RunConfig c = parse_config(kSmallSolve);
    EXPECT_EQ(c.grid.tangentialPoints, 32u);
    EXPECT_EQ(c.solve.lambda, cplx(4.0, 1.0));
    EXPECT_EQ(c.sector.zetaCase, ZetaCase::C3);
    EXPECT_TRUE(c.sections.count("grid"));
    EXPECT_FALSE(c.sections.count("bent"));
    EXPECT_FALSE(c.seed.has_value());
}

TEST(Config, ListsAndSeed) {
    const RunConfig c = parse_config("[run]\nseed = 42\n[contour]\ntimes = 0.1, 0.2 ,3\n");
    ASSERT_TRUE(c.seed.has_value());
    EXPECT_EQ(*c.seed, 42u);
    EXPECT_EQ(c.evolve.times, (std::vector<double>{0.1, 0.2, 3.0}));
}

TEST(Config, RejectsUnknownKeysSectionsAndBadValues) {
    EXPECT_THROW(parse_config("[fluid]\nviscosity = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[nowhere]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[fluid]\nmu = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("[sector]\nzeta_case = C9\n"), std::exception);
}

TEST(Config, ExampleFileParses) {
    const RunConfig c = load_config(FSLAB_EXAMPLE_CONFIG);
    for (const auto& cmd : kCommands)
        for (const auto& s : required_sections(cmd)) EXPECT_TRUE(c.sections.count(s)) << cmd << " " << s;
}

TEST(Config, HashIgnoresFormattingButNotValues) {
    const auto tol = default_tolerances("solve");
    const RunConfig a = parse_config(kSmallSolve);
    const RunConfig b = parse_config("[fluid]\nmu=1.0\n[sector]\n[grid]\nnormal_nodes=32\ntangential_points=32\n"
                                     "[solve]\nlambda_im = 1.0\nlambda_re = 4.0\n");
    EXPECT_EQ(fnv1a(canonical_text(a, "solve", tol)), fnv1a(canonical_text(b, "solve", tol)));
    RunConfig c = a;
    c.solve.lambda = cplx(4.0, 1.0000000001);
    EXPECT_NE(fnv1a(canonical_text(a, "solve", tol)), fnv1a(canonical_text(c, "solve", tol)));
    auto tol2 = tol;
    apply_override(tol2, "solve.residual=1e-3");
    EXPECT_NE(fnv1a(canonical_text(a, "solve", tol)), fnv1a(canonical_text(a, "solve", tol2)));
    // Sections the command does not read do not enter the hash.
    RunConfig d = a;
    d.bent.lambda = 99.0;
    EXPECT_EQ(fnv1a(canonical_text(a, "solve", tol)), fnv1a(canonical_text(d, "solve", tol)));
}

TEST(Config, ToleranceOverrides) {
    auto tol = default_tolerances("bent");
    apply_override(tol, "bent.ratio=0.25");
    EXPECT_EQ(tol.at("bent.ratio"), 0.25);
    EXPECT_THROW(apply_override(tol, "bent.unknown=1"), ConfigError);
    EXPECT_THROW(apply_override(tol, "bent.ratio"), ConfigError);
    EXPECT_TRUE(needs_seed("scan-nab"));
    EXPECT_FALSE(needs_seed("solve"));
}

TEST(Report, FloatsHaveSeventeenDigitsAndNonFiniteIsNull) {
    json j;
    j["x"] = 0.1;
    j["inf"] = std::numeric_limits<double>::infinity();
    j["n"] = 3;
    std::ostringstream os;
    write_json(os, j);
    const std::string s = os.str();
    EXPECT_NE(s.find("0.10000000000000001"), std::string::npos) << s;
    EXPECT_NE(s.find("\"inf\": null"), std::string::npos) << s;
    EXPECT_NE(s.find("\"n\": 3"), std::string::npos) << s;
    EXPECT_DOUBLE_EQ(json::parse(s)["x"].get<double>(), 0.1);
}

TEST(Report, Verdicts) {
    json r;
    add_verdict(r, "a", 1.0, "<=", 2.0);
    add_verdict(r, "b", 0.0, "==", 0.0);
    EXPECT_TRUE(all_pass(r));
    add_verdict(r, "c", 3.0, "<", 2.0);
    EXPECT_FALSE(all_pass(r));
    EXPECT_EQ(r["verdicts"].size(), 3u);
    EXPECT_FALSE(r["verdicts"][2]["pass"].get<bool>());
}

TEST(Executable, SolveSucceedsAndWritesArtifacts) {
    TempDir t;
    const auto cfg = t.file("c.ini", kSmallSolve);
    const auto out = t.path / "out";
    EXPECT_EQ(run_cli("solve --config " + cfg + " --out " + out.string()), 0);
    const json r = read_report(out);
    EXPECT_EQ(r["command"], "solve");
    EXPECT_EQ(r["exitCode"], 0);
    EXPECT_EQ(r["configHash"].get<std::string>().size(), 16u);
    EXPECT_TRUE(r.contains("gitDescribe"));
    EXPECT_GT(r["wallTime"].get<double>(), 0.0);
    ASSERT_FALSE(r["verdicts"].empty());
    EXPECT_TRUE(r["verdicts"][0]["pass"].get<bool>());
    for (const char* f : {"velocity.csv", "density.csv", "height.csv", "velocity.bin", "velocity.bin.json", "residuals.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
}

TEST(Executable, ConfigErrorsExitWithTwo) {
    TempDir t;
    const auto out = (t.path / "out").string();
    EXPECT_EQ(run_cli("solve --config " + t.file("bad.ini", "[fluid]\nmu = 1\n") + " --out " + out), 2);
    EXPECT_EQ(read_report(out)["error"]["kind"], "config");
    EXPECT_EQ(run_cli("scan-nab --config " + t.file("c.ini", kSmallSolve + std::string("[scan]\n")) + " --out " + out), 2);
    EXPECT_EQ(run_cli("solve --config " + t.file("d.ini", kSmallSolve) + " --out " + out + " --tol-override x=1"), 2);
    EXPECT_EQ(run_cli("nonsense --config " + t.file("e.ini", kSmallSolve) + " --out " + out), 2);
}

TEST(Executable, FailedVerdictExitsWithFour) {
    TempDir t;
    const auto cfg = t.file("c.ini", kSmallSolve);
    const auto out = t.path / "out";
    EXPECT_EQ(run_cli("solve --config " + cfg + " --out " + out.string() + " --tol-override solve.residual=1e-300"), 4);
    const json r = read_report(out);
    EXPECT_EQ(r["exitCode"], 4);
    EXPECT_FALSE(r["verdicts"][0]["pass"].get<bool>());
}

TEST(Executable, NumericalErrorExitsWithThree) {
    TempDir t;
    std::string text = kSmallSolve;
    text.replace(text.find("lambda_re = 4"), 13, "lambda_re = -5");
    text.replace(text.find("lambda_im = 1"), 13, "lambda_im = 0");
    const auto out = t.path / "out";
    EXPECT_EQ(run_cli("solve --config " + t.file("c.ini", text) + " --out " + out.string()), 3);
    EXPECT_TRUE(read_report(out).contains("error"));
}

TEST(Executable, SeededScanIsDeterministic) {
    TempDir t;
    const auto cfg = t.file("c.ini", std::string(kSmallSolve) + "[scan]\nsamples = 2000\n");
    const auto a = t.path / "a", b = t.path / "b";
    ASSERT_EQ(run_cli("scan-nab --config " + cfg + " --seed 5 --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run_cli("scan-nab --config " + cfg + " --seed 5 --threads 2 --out " + b.string()), 0);
    json ra = read_report(a), rb = read_report(b);
    EXPECT_EQ(ra["configHash"], rb["configHash"]);
    EXPECT_EQ(ra["results"].dump(), rb["results"].dump());
}
