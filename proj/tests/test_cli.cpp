#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path corpus = FLATMOD_CORPUS;

struct CliRun {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("flatmod_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

CliRun run(const std::string& args) {
    const fs::path dir = scratch_dir("run");
    const std::string cmd = std::string("\"") + FLATMOD_CLI + "\" --corpus \"" + corpus.string() + "\" " + args +
                            " > \"" + (dir / "out").string() + "\" 2> \"" + (dir / "err").string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "out");
    r.err = slurp(dir / "err");
    fs::remove_all(dir);
    return r;
}

}  // namespace

TEST(Cli, ValidateCorpusGroup) {
    const CliRun r = run("validate N4_22");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("torsion-free"), std::string::npos);
}

TEST(Cli, ValidateCorruptedFileIsIoError) {
    const fs::path dir = scratch_dir("bad");
    std::ofstream(dir / "broken.json") << "{ \"name\": ";
    const CliRun r = run("validate \"" + (dir / "broken.json").string() + "\"");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("parse error"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, ValidateGroupWithTorsionIsValidationFailure) {
    const fs::path dir = scratch_dir("torsion");
    std::ofstream(dir / "T2.json") << R"({"name": "T2", "dimension": 2,
        "translations": [["1", "0"], ["0", "1"]],
        "generators": [{"matrix": [["1", "0"], ["0", "-1"]], "translation": ["0", "0"]}]})";
    const CliRun r = run("validate \"" + (dir / "T2.json").string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("NOT torsion-free"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, UnknownSubgroupIsIoError) {
    const CliRun r = run("congruence cusps 'Gamma1(7)'");
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, CongruenceCosetsAndGenus) {
    const CliRun c = run("congruence cosets gamma_2");
    EXPECT_EQ(c.code, 0);
    EXPECT_NE(c.out.find("index: 6"), std::string::npos);
    const CliRun g = run("--format structured congruence genus gamma0_2t");
    ASSERT_EQ(g.code, 0);
    const auto j = nlohmann::json::parse(g.out);
    EXPECT_EQ(j["genus"], 0);
    EXPECT_EQ(j["cusps"], 2);
}

TEST(Cli, BoundZeroReportsNotClosedWithGuidance) {
    const CliRun r = run("--bound 0 moduli O4_9");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("--bound"), std::string::npos) << r.err;
}

TEST(Cli, StructuredModuliOutputIsDeterministicAndCached) {
    const fs::path dir = scratch_dir("cache");
    const CliRun a = run("--format structured --out \"" + dir.string() + "\" moduli N4_4");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_TRUE(fs::exists(dir / "cache" / "N4_4.bound1.json"));
    const CliRun b = run("--format structured --out \"" + dir.string() + "\" moduli N4_4");
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["format"], "flatmod-moduli-report");
    fs::remove_all(dir);
}

TEST(Cli, DomainSvgIsByteIdentical) {
    const fs::path d1 = scratch_dir("svg1"), d2 = scratch_dir("svg2");
    ASSERT_EQ(run("--out \"" + d1.string() + "\" congruence domain gamma_2").code, 0);
    ASSERT_EQ(run("--out \"" + d2.string() + "\" congruence domain gamma_2").code, 0);
    const std::string a = slurp(d1 / "domain_gamma_2.svg"), b = slurp(d2 / "domain_gamma_2.svg");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Cli, VerificationMarksMissingManifoldAbsent) {
    const fs::path dir = scratch_dir("partial");
    for (const auto& e : fs::directory_iterator(corpus))
        if (e.path().filename() != "N4_7.json") fs::copy_file(e.path(), dir / e.path().filename());
    const std::string cmd = std::string("\"") + FLATMOD_CLI + "\" --corpus \"" + dir.string() + "\" verify-paper > \"" +
                            (dir / "report").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    const std::string report = slurp(dir / "report");
    EXPECT_EQ(WIFEXITED(status) ? WEXITSTATUS(status) : -1, 4);
    std::istringstream lines(report);
    bool absent = false;
    for (std::string line; std::getline(lines, line);)
        if (line.find("N4_7") != std::string::npos && line.find("ABSENT") != std::string::npos) absent = true;
    EXPECT_TRUE(absent) << report;
    EXPECT_NE(report.find("summary:"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, MissingSubcommandIsUsageError) {
    const CliRun r = run("");
    EXPECT_EQ(r.code, 1);
}
