#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fortifynet/bpr_pla.hpp"
#include "fortifynet/kshortest.hpp"
#include "fortifynet/milp.hpp"
#include "fortifynet/network.hpp"
#include "fortifynet/scenario.hpp"

namespace fortifynet {

enum class ModelKind { Baseline, RiskNeutral, RiskAverse, Hybrid };

std::string model_name(ModelKind k);
std::optional<ModelKind> parse_model(const std::string& s);

struct ObjectiveWeights {
    double w1 = 1.0 / 3;  ///< maximum travel time
    double w2 = 1.0 / 3;  ///< undelivered demand
    double w3 = 1.0 / 3;  ///< fortification cost
    double z_normalizer = 1.0;
    double demand_normalizer = 1.0;
    double cost_normalizer = 1.0;
};

void check_weights(const ObjectiveWeights& w);

struct RiskParams {
    double epsilon = 0.10;
    double delta = 0.5;
};

struct ModelOptions {
    BprParams bpr;
    int pla_segments = 20;
    PlaEncoding encoding = PlaEncoding::ConvexHull;  ///< exact for convex BPR under minimization
    std::optional<double> global_big_m;  ///< replaces the per-link M when set
    double closure_threshold = 0.999;     ///< disruption rates at or above this close the link
    /// Shrinks each link's grid to the flow an optimal recourse can carry (see dominance_flow_caps).
    bool dominance_caps = true;
};

struct ModelInput {
    const Network& net;
    const DemandTable& demand;
    const RouteSet& routes;
    const ScenarioSet* scenarios = nullptr;      ///< unused by the baseline
    const FortificationParams* fort = nullptr;  ///< unused by the baseline
    ObjectiveWeights weights;
    RiskParams risk;
    ModelOptions options;
};

/// One capacity state of a link in a scenario, produced by an affected endpoint.
struct CapacityState {
    NodeId node = 0;
    double rate_fortified = 0.0;    ///< (1 - gamma) * rate
    double rate_unfortified = 0.0;  ///< rate
};

struct LinkScenario {
    int link = 0;
    std::vector<CapacityState> states;  ///< empty for undisrupted links
};

/// Everything needed to read a solved model back in domain terms.
struct BuiltModel {
    ModelKind kind = ModelKind::Baseline;
    MilpModel model;
    std::vector<std::string> warnings;
    std::vector<std::string> scenario_keys;  ///< name token per scenario; {""} for the baseline
    std::vector<double> probabilities;
    std::map<int, PlaGrid> grids;            ///< per link id
    std::vector<std::vector<LinkScenario>> link_states;  ///< [scenario][link position]
    ObjectiveWeights weights;
    RiskParams risk;
    BprParams bpr;
    /// Upper bound on how far any modelled route time can sit above its exact BPR value.
    double route_time_error_bound = 0.0;
};

/// U_l = max(V_l, total demand of OD pairs with a route through l).
std::map<int, double> link_upper_bounds(const Network& net, const DemandTable& demand, const RouteSet& routes);

double max_free_flow_route_time(const Network& net, const RouteSet& routes);

/// Routing nothing is always feasible, so an optimal recourse has
/// z <= zff + (w2/w1) zn D / Dn, which bounds t and hence h on every routed link.
/// Returns min(U_l, cap_l); links on no route keep U_l. Unchanged when w1 = 0.
std::map<int, double> dominance_flow_caps(const Network& net, const DemandTable& demand, const RouteSet& routes,
                                          const ObjectiveWeights& w, const BprParams& bpr);

BuiltModel build_baseline(const ModelInput& in);
BuiltModel build_rn(const ModelInput& in);
BuiltModel build_ra(const ModelInput& in);
BuiltModel build_rnra(const ModelInput& in);
BuiltModel build_model(ModelKind kind, const ModelInput& in);

using RouteKey = std::tuple<NodeId, NodeId, int>;  ///< (o, d, r) with r 1-based
using OdKey = std::pair<NodeId, NodeId>;

struct ScenarioResult {
    std::string id;
    double probability = 1.0;
    std::map<RouteKey, double> route_flow;
    std::map<int, double> link_flow;
    std::map<int, double> link_time;        ///< solver value
    std::map<int, double> link_time_model;  ///< T0 + coef * PLA(h) under the chosen plan
    std::map<RouteKey, double> route_time;
    double z = 0.0;
    std::map<OdKey, double> undelivered;
    std::map<int, double> residual_capacity;
    double total_undelivered = 0.0;
    double relative_undelivered = 0.0;
    double total_travel_time = 0.0;  ///< sum over links of h * link_time_model
    double cost = 0.0;               ///< w1 z / zn + w2 sum u / Dn
};

struct Solution {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    double objective_recomputed = 0.0;
    std::optional<double> gap;
    std::set<NodeId> fortified;
    std::vector<ScenarioResult> scenarios;
    std::optional<double> v;
    std::map<std::string, double> tau;
    std::vector<std::string> violations;
};

/// Splits "f(1,6,3,xi_1)" into ("f", {"1","6","3","xi_1"}); a bare name has no arguments.
std::pair<std::string, std::vector<std::string>> split_var_name(const std::string& name);

Solution extract_solution(const BuiltModel& built, const RawSolution& raw, const ModelInput& in);

/// Tail expectation by sorting: mean of the worst epsilon probability mass.
double cvar_by_sorting(const std::vector<double>& costs, const std::vector<double>& probs, double epsilon);

}  // namespace fortifynet
