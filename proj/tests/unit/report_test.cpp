#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "fortifynet/error.hpp"
#include "report.hpp"

using namespace fortifynet;
using namespace fortifynet::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fortifynet_report_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Csv, Quoting) {
    EXPECT_EQ(report::csv_field("plain"), "plain");
    EXPECT_EQ(report::csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(report::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(report::csv_field("two\nlines"), "\"two\nlines\"");
    EXPECT_EQ(report::csv_field(""), "");
}

TEST(ExitCodes, ByStatus) {
    EXPECT_EQ(report::exit_code_for(SolveStatus::Optimal), 0);
    EXPECT_EQ(report::exit_code_for(SolveStatus::Feasible), 0);
    EXPECT_EQ(report::exit_code_for(SolveStatus::Infeasible), 2);
    EXPECT_EQ(report::exit_code_for(SolveStatus::Unbounded), 2);
    EXPECT_EQ(report::exit_code_for(SolveStatus::Error), 3);
}

TEST(Digest, KnownVector) {
    EXPECT_EQ(report::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Measures, WritesAllTables) {
    const fs::path dir = scratch("measures");
    const std::vector<MeasureKind> kinds(all_measures().begin(), all_measures().end());
    report::write_measures(sioux_falls(), sioux_falls_demand(), kinds, 3,
                           report::measure_options(sioux_falls_demand(), false), dir);
    const std::string wide = slurp(dir / "measures.csv");
    EXPECT_EQ(count_lines(wide), 25u);
    EXPECT_EQ(wide.substr(0, 5), "node,");
    EXPECT_EQ(count_lines(slurp(dir / "measures_long.csv")), 1u + 27u * 24u);
    EXPECT_EQ(count_lines(slurp(dir / "rankings.csv")), 1u + 27u * 3u);
    fs::remove_all(dir);
}

TEST(Measures, OdRestrictedBetweennessByDefault) {
    const auto od = report::measure_options(sioux_falls_demand(), false);
    EXPECT_EQ(od.od_pairs.size(), sioux_falls_demand().entries().size());
    EXPECT_TRUE(report::measure_options(sioux_falls_demand(), true).od_pairs.empty());
}

TEST(Routes, WritesJson) {
    const fs::path dir = scratch("routes");
    const RouteSet rs = build_route_sets(sioux_falls(), sioux_falls_demand(), unit_weights(sioux_falls()), 10);
    report::write_routes(sioux_falls(), rs, dir);
    EXPECT_NE(slurp(dir / "routes.json").find("\"(1,6)\""), std::string::npos);
    fs::remove_all(dir);
}

TEST(Case, LoadsBundledInputs) {
    const report::RunSpec spec = report::default_spec();
    const report::Case c = report::load_case(spec);
    EXPECT_EQ(c.net.node_count(), 24u);
    EXPECT_EQ(c.routes.route_count(), 160u);
    EXPECT_EQ(c.scenarios.scenarios.size(), 27u);
    EXPECT_EQ(c.digests.size(), 3u);
    for (const auto& [p, d] : c.digests) EXPECT_EQ(d.size(), 64u) << p;
}

TEST(Case, BadPathIsAnError) {
    report::RunSpec spec = report::default_spec();
    spec.net_path = "/nonexistent/net.tntp";
    EXPECT_THROW(report::load_case(spec), Error);
}

TEST(Expected, ProbabilityWeighted) {
    Solution s;
    ScenarioResult a, b;
    a.probability = 0.25;
    a.relative_undelivered = 1.0;
    b.probability = 0.75;
    b.relative_undelivered = 0.2;
    s.scenarios = {a, b};
    EXPECT_DOUBLE_EQ(report::expected_undelivered(s), 0.25 + 0.15);
}
