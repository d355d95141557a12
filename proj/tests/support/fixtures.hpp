#pragma once

#include <random>
#include <string>
#include <vector>

#include "fortifynet/kshortest.hpp"
#include "fortifynet/network.hpp"
#include "fortifynet/scenario.hpp"
#include "fortifynet/solver_bridge.hpp"
#include "fortifynet/stochastic.hpp"

namespace fortifynet::testing {

std::string data_path(const std::string& name);
std::string golden_path(const std::string& name);

const Network& sioux_falls();
/// Demand fixture at the default multiplier of 100.
const DemandTable& sioux_falls_demand();
FortificationParams sioux_falls_fortification();

/// Network from (tail, head, t0, capacity) tuples; nodes are inferred.
struct Arc {
    NodeId tail;
    NodeId head;
    double t0 = 1.0;
    double capacity = 1.0;
};
Network make_network(const std::vector<Arc>& arcs, std::vector<NodeId> extra_nodes = {});

/// Directed graph on n nodes (ids 1..n) with each ordered pair present with probability p.
Network random_graph(std::mt19937& rng, int n, double p);

/// Solver configuration for the configured executable, or an empty executable when none exists.
SolverConfig test_solver();
bool solver_available();

/// Small stochastic instance that fits the exhaustive oracle.
struct TinyInstance {
    Network net;
    DemandTable demand;
    RouteSet routes;
    ScenarioSet scenarios;
    FortificationParams fort;
    ModelKind kind = ModelKind::RiskNeutral;
    ObjectiveWeights weights;
    RiskParams risk;
    double grid = 0.1;
    std::string describe() const;

    ModelInput input(int pla_segments = 20, PlaEncoding enc = PlaEncoding::ConvexHull) const;
};

TinyInstance random_tiny_instance(std::mt19937& rng);

/// Checks MILP against the oracle: milp <= oracle + pla slack, oracle <= milp + grid slack.
struct OracleComparison {
    double milp = 0.0;
    double oracle = 0.0;
    double pla_slack = 0.0;
    double grid_slack = 0.0;
    bool ok = false;
    std::string detail;
};
OracleComparison compare_with_oracle(const TinyInstance& inst, const SolverConfig& cfg);

}  // namespace fortifynet::testing
