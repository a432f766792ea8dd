#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "emzv/cli.hpp"

using namespace emzv;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "emzv");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("emzv_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, ParseTau) {
    EXPECT_EQ(cli::parse_tau("0+1i"), Cx(0, 1));
    EXPECT_EQ(cli::parse_tau("0.3+1.1i"), Cx(0.3, 1.1));
    EXPECT_EQ(cli::parse_tau("-0.25-2e-1i"), Cx(-0.25, -0.2));
    EXPECT_EQ(cli::parse_tau("2i"), Cx(0, 2));
    EXPECT_EQ(cli::parse_tau("i"), Cx(0, 1));
    EXPECT_EQ(cli::parse_tau("1+i"), Cx(1, 1));
    EXPECT_THROW(cli::parse_tau("1"), ContractError);
    EXPECT_THROW(cli::parse_tau("1+2j"), ContractError);
}

TEST(Cli, WordSelectionOrder) {
    auto ws = cli::select_words({"2", "-1,-1", "0", "-1,-1"}, "", 8);
    ASSERT_EQ(ws.size(), 3u);
    EXPECT_EQ(ws[0], (IndexWord{0}));  // weight 2, depth 1
    EXPECT_EQ(ws[1], (IndexWord{-1, -1}));
    EXPECT_EQ(ws[2], (IndexWord{2}));
    auto r = cli::select_words({}, "1:3", 2);
    EXPECT_EQ(r.size(), 1u + 2u + 3u);
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r[i - 1], r[i]);
    EXPECT_TRUE(cli::select_words({}, "", 8).empty());
    EXPECT_THROW(cli::select_words({}, "3:1", 8), ContractError);
    EXPECT_THROW(cli::select_words({"1,,2"}, "", 8), ContractError);
}

TEST(Cli, RecordJsonRoundTripIsExact) {
    std::vector<ResultRecord> rs{
        {"I", {-1, 2}, Cx(0.1, 1.0 / 3), Cx(M_PI, -std::exp(1.0)), 1.2345678901234567e-13, {{"version", "x"}}},
        {"check", {}, Cx(0, 1), Cx(HUGE_VAL, 0), 0.5, {{"name", "a"}, {"identity", "b"}}},
    };
    auto back = records_from_json(records_to_json(rs));
    ASSERT_EQ(back.size(), rs.size());
    EXPECT_EQ(back, rs);
    EXPECT_EQ(records_to_json(back), records_to_json(rs));
    EXPECT_EQ(std::stod(fmt17(M_PI)), M_PI);
}

TEST(Cli, CsvLayout) {
    std::vector<ResultRecord> rs{{"I", {-1}, Cx(0, 1), Cx(1, 0), 0, {}}, {"J", {0, 1}, Cx(0, 2), Cx(0, 2), 0, {}}};
    std::string csv = records_to_csv(rs);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "kind,word,tau_re,tau_im,value_re,value_im,est_error");
}

TEST(Cli, ComputeExamples) {
    auto dir = fresh_dir("examples");
    auto a = run({"compute", "--kind", "I", "--word", "-1,-1", "--tau", "0+1i", "--cache-dir", dir.string()});
    ASSERT_EQ(a.code, 0) << a.err;
    auto ra = records_from_json(a.out);
    ASSERT_EQ(ra.size(), 1u);
    EXPECT_NEAR(std::abs(ra[0].value - 0.5), 0, 1e-10);

    auto b = run({"compute", "--kind", "J", "--word", "-1", "--tau", "0+2i", "--cache-dir", dir.string()});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NEAR(std::abs(records_from_json(b.out)[0].value - Cx(0, 2)), 0, 1e-10);

    auto e = run({"compute", "--kind", "I", "--cache-dir", dir.string()});
    EXPECT_EQ(e.code, 0);
    EXPECT_TRUE(records_from_json(e.out).empty());
}

TEST(Cli, ExitCodes) {
    auto dir = fresh_dir("codes").string();
    EXPECT_EQ(run({"check", "--suite", "nonsense"}).code, 2);
    EXPECT_EQ(run({"compute", "--kind", "K", "--word", "1"}).code, 2);
    EXPECT_EQ(run({"compute", "--kind", "I", "--word", "1,x", "--cache-dir", dir}).code, 2);
    EXPECT_EQ(run({"compute", "--kind", "I", "--word", "-2", "--cache-dir", dir}).code, 2);
    EXPECT_EQ(run({"compute", "--kind", "I", "--word", "1", "--tau", "0.5-1i", "--cache-dir", dir}).code, 2);
    EXPECT_EQ(run({"compute", "--kind", "I", "--word", "1", "--max-depth", "9"}).code, 2);
    EXPECT_EQ(run({"compute", "--kind", "I", "--word", "11", "--cache-dir", dir}).code, 3);
    EXPECT_EQ(run({"compute", "--kind", "asymptotic", "--word", "7,1"}).code, 3);
    EXPECT_EQ(run({"export", "--output", "/tmp/x.json"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, CheckSuites) {
    auto ok = run({"check", "--suite", "reversal", "--tau", "0+1i", "--max-weight", "5"});
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_NE(ok.out.find("PASS  reversal I"), std::string::npos);
    EXPECT_NE(ok.out.find("2 of 2 checks passed"), std::string::npos);

    auto ode = run({"check", "--suite", "ode", "--tau", "0+1i", "--format", "json"});
    EXPECT_EQ(ode.code, 0);
    for (const auto& r : records_from_json(ode.out)) EXPECT_LT(r.value.real(), 1e-5);

    auto bad = run({"check", "--suite", "reversal", "--max-weight", "3", "--tolerance", "1e-30"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
}

TEST(Cli, CacheReuseAndCorruption) {
    auto dir = fresh_dir("cache");
    std::vector<std::string> args{"compute", "--kind", "I",          "--weights", "1:3",
                                  "--tau",   "0.2+1.3i", "--cache-dir", dir.string()};
    auto first = run(args);
    ASSERT_EQ(first.code, 0);
    std::size_t files = std::distance(fs::directory_iterator(dir), fs::directory_iterator{});
    EXPECT_EQ(files, 7u);
    auto second = run(args);
    EXPECT_EQ(second.out, first.out);
    EXPECT_TRUE(second.err.empty());

    auto nocache = run({"compute", "--kind", "I", "--weights", "1:3", "--tau", "0.2+1.3i", "--no-cache"});
    auto a = records_from_json(first.out), b = records_from_json(nocache.out);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i].value - b[i].value), 1e-12);

    // flip one digit in a stored record
    fs::path victim = fs::directory_iterator(dir)->path();
    std::string text = slurp(victim);
    auto pos = text.find("\"re\":");
    ASSERT_NE(pos, std::string::npos);
    char& ch = text[text.find_first_of("0123456789", pos)];
    ch = ch == '9' ? '8' : char(ch + 1);
    std::ofstream(victim, std::ios::binary) << text;
    auto third = run(args);
    EXPECT_EQ(third.code, 0);
    EXPECT_NE(third.err.find("checksum"), std::string::npos);
    EXPECT_EQ(third.out, first.out);
}

TEST(Cli, EnvironmentSelectsCacheDir) {
    auto dir = fresh_dir("env");
    setenv("EMZV_CACHE_DIR", dir.c_str(), 1);
    auto r = run({"compute", "--kind", "I", "--word", "0"});
    unsetenv("EMZV_CACHE_DIR");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(dir) && !fs::is_empty(dir));
}

TEST(Cli, ExportIsDeterministic) {
    auto dir = fresh_dir("export");
    fs::create_directories(dir);
    auto out1 = (dir / "a.json").string(), out2 = (dir / "b.json").string(), csv = (dir / "c.csv").string();
    std::vector<std::string> base{"export", "--kind", "J", "--weights", "1:4", "--tau", "0.1+1.2i", "--no-cache"};
    auto a = base, b = base, c = base;
    a.insert(a.end(), {"--output", out1});
    b.insert(b.end(), {"--output", out2, "--jobs", "3"});
    c.insert(c.end(), {"--output", csv, "--format", "csv", "--word", "0,-1"});
    ASSERT_EQ(run(a).code, 0);
    ASSERT_EQ(run(b).code, 0);
    ASSERT_EQ(run(c).code, 0);
    EXPECT_EQ(slurp(out1), slurp(out2));
    auto rs = records_from_json(slurp(out1));
    EXPECT_EQ(rs.size(), 1u + 2u + 4u + 8u);
    for (std::size_t i = 1; i < rs.size(); ++i) EXPECT_LT(IndexWord(rs[i - 1].word), IndexWord(rs[i].word));
    std::string text = slurp(csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 16);

    auto two = (dir / "two.csv").string();
    ASSERT_EQ(run({"export", "--kind", "I", "--word", "-1", "--word", "0", "--format", "csv", "--no-cache",
                   "--output", two})
                  .code,
              0);
    text = slurp(two);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Cli, ExportCheckReportCarriesIdentityNames) {
    auto dir = fresh_dir("report");
    fs::create_directories(dir);
    auto path = (dir / "r.json").string();
    ASSERT_EQ(run({"export", "--suite", "associator", "--output", path}).code, 0);
    auto rs = records_from_json(slurp(path));
    ASSERT_EQ(rs.size(), 3u);
    for (const auto& r : rs) {
        EXPECT_EQ(r.kind, "check");
        EXPECT_FALSE(r.meta.at("identity").empty());
        EXPECT_EQ(r.meta.at("passed"), "true");
    }
    EXPECT_EQ(rs[2].meta.at("identity"), "|coefficient of ab| = zeta(2)");
}

TEST(Cli, ExportToUnwritablePath) {
    auto r = run({"export", "--kind", "I", "--word", "0", "--no-cache", "--output", "/nonexistent/dir/x.json"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("cannot write"), std::string::npos);
}

TEST(Cli, AsymptoticLayers) {
    auto r = run({"compute", "--kind", "asymptotic", "--word", "1", "--word", "-1,-1,0", "--layers", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rs = records_from_json(r.out);
    ASSERT_EQ(rs.size(), 6u);
    EXPECT_EQ(rs[0].meta.at("layer"), "0");
    EXPECT_LT(std::abs(rs[1].value), 1e-8);  // depth one: no q corrections
    EXPECT_GT(std::abs(rs[4].value), 0.5);   // (-1,-1,0) has a q^1 term
}
