#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sentinel/cli.hpp"

using namespace sentinel;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "chase-sentinel");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("sentinel_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Cli, AnalyzeExitCodes) {
    EXPECT_EQ(cli({"analyze", oracle::ruleset_path("r1"), "--k", "1"}).code, 0);
    EXPECT_EQ(cli({"analyze", oracle::ruleset_path("r1"), "--k", "0"}).code, 1);
    EXPECT_EQ(cli({"analyze", "/nonexistent.dlgp"}).code, 3);
    EXPECT_EQ(cli({"analyze", oracle::ruleset_path("r1"), "--condition", "swa"}).code, 3);
    EXPECT_EQ(cli({"analyze", oracle::ruleset_path("r1"), "--k", "1", "--budget-probes", "2"}).code, 2);
}

TEST(Cli, AnalyzeJsonReport) {
    auto r = cli({"analyze", oracle::ruleset_path("r2"), "--k", "1", "--json"});
    ASSERT_EQ(r.code, 1);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["version"], kReportVersion);
    EXPECT_EQ(j["status"], "NotProven");
    EXPECT_EQ(j["input"]["sha256"].get<std::string>().size(), 64u);
    EXPECT_TRUE(j.contains("witness"));
    EXPECT_TRUE(j["witness"].contains("steps"));
    for (const char* key : {"cyclesEnumerated", "cyclesPruned", "cyclesChecked", "renamingsTried", "elapsed",
                            "peakAtoms"})
        EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Cli, DigestOfTheInput) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, ParseErrorIsAUsageError) {
    fs::path dir = scratch("bad");
    std::ofstream(dir / "bad.dlgp") << "p(a).\np(X).\n";
    auto r = cli({"analyze", (dir / "bad.dlgp").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(Cli, ChaseEmitsJsonLines) {
    fs::path dir = scratch("chase");
    std::ofstream(dir / "db.dlgp") << "hasKey(a,b).\n";
    auto r = cli({"chase", oracle::ruleset_path("access_grants"), "--variant", "skolem", "--database",
                  (dir / "db.dlgp").string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::vector<nlohmann::json> recs;
    while (std::getline(lines, line))
        if (!line.empty()) recs.push_back(nlohmann::json::parse(line));
    ASSERT_GE(recs.size(), 2u);
    EXPECT_EQ(recs[0]["step"], 1);
    EXPECT_EQ(recs[0]["rule"], "r4");
    EXPECT_TRUE(recs[0].contains("bindings"));
    EXPECT_TRUE(recs[0].contains("added"));
}

TEST(Cli, ChaseStepBudget) {
    fs::path dir = scratch("keys");
    std::ofstream(dir / "db.dlgp") << "hasKey(a,b).\n";
    auto r = cli({"chase", oracle::ruleset_path("access_keys"), "--database", (dir / "db.dlgp").string(),
                  "--max-steps", "4"});
    EXPECT_NE(r.code, 3) << r.err;
    EXPECT_NE(r.out.find("enters"), std::string::npos);
}

TEST(Cli, ReportOnAnEmptyDirectoryIsHeaderOnly) {
    fs::path dir = scratch("empty");
    auto csv = cli({"report", dir.string()});
    ASSERT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out, "k,k-safe(agrd),k-safe(wa),k-safe(ja),k-safe(mfa)\n");
    auto md = cli({"report", dir.string(), "--format", "markdown"});
    EXPECT_EQ(md.out, "| k | k-safe(agrd) | k-safe(wa) | k-safe(ja) | k-safe(mfa) |\n|---|---|---|---|---|\n");
}

TEST(Cli, ReportCountsMembers) {
    fs::path dir = scratch("grid");
    fs::copy_file(oracle::ruleset_path("r1"), dir / "r1.dlgp");
    fs::copy_file(oracle::ruleset_path("counter"), dir / "counter.dlgp");
    auto r = cli({"report", dir.string(), "--conditions", "wa", "--k-max", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "k,k-safe(wa)\n0,0\n1,2\n");
}

TEST(Cli, CheckAndCycles) {
    auto ck = cli({"check", oracle::ruleset_path("erule"), "--condition", "mfa", "--json"});
    auto j = nlohmann::json::parse(ck.out);
    EXPECT_EQ(j["holds"], "false");
    auto cy = cli({"cycles", oracle::ruleset_path("r1"), "--k", "1", "--json"});
    auto c = nlohmann::json::parse(cy.out);
    EXPECT_EQ(c["cycles"].size(), 6u);
}

TEST(Cli, BoundedExitCodes) {
    EXPECT_EQ(cli({"bounded", oracle::ruleset_path("r1"), "--delta", "const:3"}).code, 0);
    EXPECT_EQ(cli({"bounded", oracle::ruleset_path("r1"), "--delta", "const:2"}).code, 1);
    EXPECT_EQ(cli({"bounded", oracle::ruleset_path("r1"), "--delta", "poly:2"}).code, 3);
}

TEST(Cli, GenerateIsParseable) {
    auto r = cli({"generate", "--preset", "discrete", "--seed", "4"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(parse_dlgp(r.out).rules.size(), 10u);
    EXPECT_EQ(cli({"generate", "--pool", "1", "--max-repeated", "1"}).code, 3);
}

TEST(Cli, NoSubcommandIsAUsageError) { EXPECT_EQ(cli({}).code, 3); }
