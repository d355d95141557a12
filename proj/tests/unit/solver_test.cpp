#include <gtest/gtest.h>

#include <sys/stat.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "fortifynet/error.hpp"
#include "fortifynet/solver_bridge.hpp"

using namespace fortifynet;
using namespace fortifynet::testing;
namespace fs = std::filesystem;

namespace {

MilpModel trivial() {
    MilpModel m;
    const VarId x = m.add_variable("x", VarKind::Continuous);
    m.add_constraint("c1", LinearExpr{}.add(x, 1.0), Sense::GreaterEqual, 1.0);
    m.set_objective(LinearExpr{}.add(x, 1.0));
    return m;
}

MilpModel infeasible() {
    MilpModel m;
    const VarId x = m.add_variable("x", VarKind::Continuous);
    m.add_constraint("lo", LinearExpr{}.add(x, 1.0), Sense::GreaterEqual, 1.0);
    m.add_constraint("hi", LinearExpr{}.add(x, 1.0), Sense::LessEqual, 0.0);
    m.set_objective(LinearExpr{}.add(x, 1.0));
    return m;
}

MilpModel knapsack() {
    MilpModel m;
    LinearExpr obj, cap;
    const double value[] = {6, 5, 4, 3}, weight[] = {5, 4, 3, 2};
    for (int i = 0; i < 4; ++i) {
        const VarId v = m.add_variable("x(" + std::to_string(i + 1) + ")", VarKind::Binary);
        obj.add(v, -value[i]);
        cap.add(v, weight[i]);
    }
    m.add_constraint("cap", cap, Sense::LessEqual, 9.0);
    obj.constant = 20;
    m.set_objective(obj);
    return m;
}

class FakeSolver : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("fortifynet_fake_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string script(const std::string& name, const std::string& body) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << "#!/bin/sh\n" << body;
        ::chmod(p.c_str(), 0755);
        return p.string();
    }

    fs::path dir_;
};

std::vector<std::string> solvers() {
    std::vector<std::string> out;
    if (solver_available()) out.push_back(default_solver_executable());
#ifdef FORTIFYNET_TEST_CBC
    if (fs::exists(FORTIFYNET_TEST_CBC)) out.push_back(FORTIFYNET_TEST_CBC);
#endif
    return out;
}

}  // namespace

TEST(Dialects, Names) {
    for (auto d : {SolutionDialect::NameValue, SolutionDialect::CplexXml, SolutionDialect::Cbc, SolutionDialect::Highs})
        EXPECT_EQ(parse_dialect(dialect_name(d)), d);
    EXPECT_FALSE(parse_dialect("mps"));
    EXPECT_EQ(solver_config_for("/x/highs").dialect, SolutionDialect::Highs);
    EXPECT_EQ(solver_config_for("/x/cbc").dialect, SolutionDialect::Cbc);
    EXPECT_EQ(solver_config_for("/x/other").dialect, SolutionDialect::NameValue);
}

TEST(Dialects, NameValue) {
    const MilpModel m = trivial();
    const auto r = parse_solution("# comment\nstatus optimal\nobjective 1\nx 1\n", SolutionDialect::NameValue, m);
    EXPECT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.objective, 1.0);
    EXPECT_DOUBLE_EQ(r.values.at("x"), 1.0);
    EXPECT_EQ(parse_solution("status infeasible\n", SolutionDialect::NameValue, m).status, SolveStatus::Infeasible);
    EXPECT_THROW(parse_solution("x\n", SolutionDialect::NameValue, m), SolverError);
    EXPECT_THROW(parse_solution("x abc\n", SolutionDialect::NameValue, m), SolverError);
}

TEST(Dialects, Xml) {
    const MilpModel m = trivial();
    const std::string xml = R"xml(<?xml version="1.0"?>
<CPLEXSolution version="1.2">
 <header objectiveValue="1.5" solutionStatusString="integer optimal solution"/>
 <variables>
  <variable name="x" index="0" value="1.5"/>
  <variable name="f(1,6,1,xi_1)" index="1" value="2"/>
 </variables>
</CPLEXSolution>)xml";
    const auto r = parse_solution(xml, SolutionDialect::CplexXml, m);
    EXPECT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.objective, 1.5);
    EXPECT_DOUBLE_EQ(r.values.at("f(1,6,1,xi_1)"), 2.0);
    EXPECT_EQ(parse_solution(R"(<header solutionStatusString="integer infeasible"/>)", SolutionDialect::CplexXml, m).status,
              SolveStatus::Infeasible);
    EXPECT_EQ(parse_solution(R"(<header objectiveValue="2" solutionStatusString="integer optimal, tolerance"/>)",
                             SolutionDialect::CplexXml, m)
                  .status,
              SolveStatus::Feasible);
}

TEST(Dialects, Cbc) {
    MilpModel m = trivial();
    m.add_variable("y", VarKind::Binary);
    const auto r = parse_solution("Optimal - objective value 1.00000000\n      0 x      1       1\n", SolutionDialect::Cbc, m);
    EXPECT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.objective, 1.0);
    EXPECT_DOUBLE_EQ(r.values.at("x"), 1.0);
    EXPECT_DOUBLE_EQ(r.values.at("y"), 0.0);
    EXPECT_EQ(parse_solution("Infeasible - objective value 0\n", SolutionDialect::Cbc, m).status, SolveStatus::Infeasible);
    EXPECT_EQ(parse_solution("Stopped on time - objective value 3\n** 0 x 3 1\n", SolutionDialect::Cbc, m).status,
              SolveStatus::Feasible);
}

TEST(Dialects, Highs) {
    const MilpModel m = trivial();
    const std::string text =
        "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 1\n# Columns 1\nx 1\n# Rows 1\nc1 1\n";
    const auto r = parse_solution(text, SolutionDialect::Highs, m);
    EXPECT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.values.at("x"), 1.0);
    EXPECT_EQ(parse_solution("Model status\nInfeasible\n\n# Primal solution values\nNone\n", SolutionDialect::Highs, m)
                  .status,
              SolveStatus::Infeasible);
}

TEST_F(FakeSolver, GenericDialectThroughSubprocess) {
    SolverConfig cfg;
    cfg.executable = script("fake", "grep -q 'c1:' \"$1\" || exit 9\nprintf 'status optimal\\nobjective 1\\nx 1\\n' > \"$2\"\n");
    cfg.args_template = {"{model}", "{solution}"};
    const auto r = solve(trivial(), cfg);
    EXPECT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.values.at("x"), 1.0);
    EXPECT_EQ(r.gap, std::optional<double>(0.0));
}

TEST_F(FakeSolver, NonzeroExitWithoutSolutionIsError) {
    SolverConfig cfg;
    cfg.executable = script("boom", "echo solver exploded\nexit 3\n");
    cfg.args_template = {"{model}", "{solution}"};
    const auto r = solve(trivial(), cfg);
    EXPECT_EQ(r.status, SolveStatus::Error);
    EXPECT_NE(r.log.find("solver exploded"), std::string::npos);
}

TEST_F(FakeSolver, GarbageSolutionThrows) {
    SolverConfig cfg;
    cfg.executable = script("junk", "echo 'x notanumber' > \"$2\"\n");
    cfg.args_template = {"{model}", "{solution}"};
    EXPECT_THROW(solve(trivial(), cfg), SolverError);
}

TEST_F(FakeSolver, KeepArtifacts) {
    SolverConfig cfg;
    cfg.executable = script("ok", "printf 'status optimal\\nobjective 1\\nx 1\\n' > \"$2\"\n");
    cfg.args_template = {"{model}", "{solution}"};
    cfg.work_dir = (dir_ / "work").string();
    fs::create_directories(cfg.work_dir);
    cfg.keep_artifacts = true;
    solve(trivial(), cfg);
    bool lp = false;
    for (const auto& e : fs::recursive_directory_iterator(cfg.work_dir)) lp |= e.path().filename() == "model.lp";
    EXPECT_TRUE(lp);
}

TEST(SolveConfig, Rejects) {
    SolverConfig cfg;
    EXPECT_THROW(solve(trivial(), cfg), SolverError);
    cfg.executable = "/nonexistent/solver";
    EXPECT_THROW(solve(trivial(), cfg), SolverError);
    cfg.executable = "/bin/true";
    cfg.time_limit = 0;
    EXPECT_THROW(solve(trivial(), cfg), Error);
}

TEST(RealSolvers, TrivialInfeasibleKnapsack) {
    const auto list = solvers();
    if (list.empty()) GTEST_SKIP() << "no MILP solver configured";
    for (const auto& exe : list) {
        SolverConfig cfg = solver_config_for(exe);
        cfg.time_limit = 60;
        const auto a = solve(trivial(), cfg);
        EXPECT_EQ(a.status, SolveStatus::Optimal) << exe;
        EXPECT_NEAR(a.objective, 1.0, 1e-9);
        EXPECT_NEAR(a.values.at("x"), 1.0, 1e-9);
        EXPECT_EQ(solve(infeasible(), cfg).status, SolveStatus::Infeasible) << exe;
        const MilpModel k = knapsack();
        const auto b = solve(k, cfg);
        ASSERT_EQ(b.status, SolveStatus::Optimal) << exe;
        EXPECT_NEAR(b.objective, 20 - 12, 1e-6) << exe;
        std::vector<double> vals(k.variables().size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = b.values.at(k.variables()[i].name);
        EXPECT_NEAR(k.objective_value(vals), b.objective, 1e-6);
    }
}
