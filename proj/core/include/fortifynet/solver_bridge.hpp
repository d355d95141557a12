#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fortifynet/milp.hpp"
#include "fortifynet/stochastic.hpp"

namespace fortifynet {

/// CPLEX LP text. Deterministic for identical models.
std::string write_lp(const MilpModel& model);

/// Reads the LP subset produced by write_lp.
MilpModel parse_lp(const std::string& text);

enum class SolutionDialect { NameValue, CplexXml, Cbc, Highs };

std::string dialect_name(SolutionDialect d);
std::optional<SolutionDialect> parse_dialect(const std::string& s);

struct SolverConfig {
    std::string executable;
    /// Placeholders: {model} {solution} {time_limit} {gap} {dir} {threads}
    std::vector<std::string> args_template;
    double time_limit = 600.0;
    double gap_tolerance = 1e-6;
    int threads = 1;
    SolutionDialect dialect = SolutionDialect::NameValue;
    std::string work_dir;        ///< parent for per-solve temp directories; system temp when empty
    bool keep_artifacts = false;
};

/// Arguments for a known solver inferred from the executable basename (highs, cbc).
SolverConfig solver_config_for(const std::string& executable);

/// Executable from FORTIFYNET_SOLVER, else the build-time default; empty when none is known.
std::string default_solver_executable();

RawSolution solve(const MilpModel& model, const SolverConfig& config);

/// Parses a solution file. Missing variables are filled with 0 for dialects that omit zeros.
RawSolution parse_solution(const std::string& text, SolutionDialect dialect, const MilpModel& model);

struct OracleResult {
    double objective = 0.0;
    std::set<NodeId> fortified;
    std::vector<double> scenario_costs;  ///< best cost per scenario under the chosen plan
};

/// Exhaustive search over fortification plans and grid route flows with exact BPR times.
OracleResult oracle_solve(ModelKind kind, const ModelInput& in, double flow_grid,
                          double max_combinations = 2e5);

}  // namespace fortifynet
