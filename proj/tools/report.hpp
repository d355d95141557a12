#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fortifynet/solver_bridge.hpp"

namespace fortifynet::report {

enum class ScenarioSource { Builtin, File, Generate };
enum class RouteWeighting { Hops, FreeFlow };

struct RunSpec {
    std::string net_path;
    std::string demand_path;
    double demand_scale = 100.0;
    std::string fort_path;
    std::optional<int> budget;  ///< overrides the budget in the fortification file
    ScenarioSource scenario_source = ScenarioSource::Builtin;
    std::string scenario_path;
    std::size_t generate_top_m = 3;
    std::vector<double> generate_rates{0.9, 0.6, 0.3};
    ModelKind model = ModelKind::RiskNeutral;
    ObjectiveWeights weights;
    RiskParams risk;
    int k = 10;
    RouteWeighting route_weighting = RouteWeighting::Hops;
    int pla_segments = 20;
    PlaEncoding encoding = PlaEncoding::ConvexHull;
    SolverConfig solver;
    std::string out_dir = "out";
    bool write_lp = false;
    bool bc_all_pairs = false;
};

/// Bundled Sioux Falls inputs.
std::string bundled_data_dir();
RunSpec default_spec();

struct Case {
    Network net;
    DemandTable demand;
    FortificationParams fort;
    RouteSet routes;
    ScenarioSet scenarios;
    std::map<std::string, std::string> digests;  ///< input path -> SHA-256
};

Case load_case(const RunSpec& spec);
Network load_network(const std::string& path);

std::string sha256_hex(const std::string& bytes);

struct RunResult {
    ModelKind kind = ModelKind::Baseline;
    double delta = 0.0;
    BuiltModel built;
    RawSolution raw;
    Solution sol;
    double build_seconds = 0.0;
};

/// z normalizer for the stochastic models: the baseline optimum of z.
double baseline_z(const Case& c, const RunSpec& spec);

ModelInput make_input(const Case& c, const RunSpec& spec, ModelKind kind, double z_normalizer);

RunResult run_model(const Case& c, const RunSpec& spec, ModelKind kind, double z_normalizer);

/// Probability-weighted mean of the relative undelivered demand.
double expected_undelivered(const Solution& sol);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);
std::string num(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Betweenness over the demand OD pairs unless all_pairs is set.
MeasureOptions measure_options(const DemandTable& demand, bool all_pairs);

void write_measures(const Network& net, const DemandTable& demand, const std::vector<MeasureKind>& kinds,
                    std::size_t top_m, const MeasureOptions& opts, const std::filesystem::path& dir);

void write_routes(const Network& net, const RouteSet& routes, const std::filesystem::path& dir);

/// Scenario table, fortified set, route flows, undelivered demand, OD max times, plot data, report.json.
void write_solve_outputs(const Case& c, const RunSpec& spec, const RunResult& r, const std::filesystem::path& dir);

/// Maximum route time per OD pair in the first scenario (the only one for the baseline).
std::map<OdKey, double> od_max_route_times(const Case& c, const ScenarioResult& s);

int exit_code_for(SolveStatus s);

}  // namespace fortifynet::report
