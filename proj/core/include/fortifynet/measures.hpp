#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fortifynet/network.hpp"

namespace fortifynet {

enum class MeasureKind {
    DegreeCentrality,
    IndegreeCentrality,
    OutdegreeCentrality,
    BetweennessCentrality,
    ClosenessCentrality,
    HarmonicCentrality,
    EigenvectorCentrality,
    KatzCentrality,
    PageRank,
    NeighborhoodConnectivity,
    GroupCentrality,
    AggregateMeasure,
    AverageRating,
    AveragePathDistance,
    AveragePathDistanceAfterDisruption,
    PhiNodeCentrality,
    ProportionalFlow,
    WeightedNode,
    WeightedNodeAfterDisruption,
    UndeliveredDemandAfterDisruption,
    PathDistanceChange,
    Segmentwise,
    Exposure,
    TsallisRedundancy,
    StarTsallisRedundancy,
    ComplexityMeasureTsallis,
    ComplexityMeasureDistribution,
};

enum class MeasureCategory { Connectivity, Accessibility, Criticality };

enum class MeasureFamily { Topological, Flow, Disruption };

const std::array<MeasureKind, 27>& all_measures();
MeasureCategory category_of(MeasureKind k);
MeasureFamily family_of(MeasureKind k);
std::string measure_name(MeasureKind k);
std::string category_name(MeasureCategory c);
std::optional<MeasureKind> parse_measure(const std::string& name);

/// Per-node values; std::nullopt marks a value the formula leaves undefined.
struct MeasureVector {
    MeasureKind kind = MeasureKind::DegreeCentrality;
    std::map<NodeId, std::optional<double>> values;
    std::vector<std::string> warnings;
};

struct MeasureOptions {
    /// Pairs used by betweenness; empty means every ordered pair of distinct nodes.
    std::vector<std::pair<NodeId, NodeId>> od_pairs;
    double katz_alpha = 0.5;
    int katz_horizon = 10;
    double eigen_tolerance = 1e-10;
    int eigen_max_iterations = 10000;
    double pagerank_damping = 0.85;
    double pagerank_tolerance = 1e-13;
    int pagerank_max_iterations = 100000;
    std::array<double, 3> aggregate_weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
    double tsallis_em = 1.43;
};

/// Flow snapshot before any disruption.
struct FlowContext {
    std::map<NodeId, double> node_flow;  ///< f_i, including flow that starts or ends at i
    std::map<NodeId, double> delivered;  ///< delivered flow per destination
    std::map<int, double> link_flow;     ///< f_ij keyed by link id

    double total_delivered() const;
};

/// All-or-nothing assignment of each OD demand onto its free-flow shortest path.
FlowContext all_or_nothing_flow(const Network& net, const DemandTable& demand);

/// Hop-count shortest distances; kUnreachable-style infinity when no path exists.
std::vector<std::vector<double>> hop_distances(const Network& net);

MeasureVector topological_measures(const Network& net, MeasureKind kind, const MeasureOptions& opts = {});
MeasureVector flow_measures(const Network& net, const FlowContext& flow, MeasureKind kind,
                            const MeasureOptions& opts = {});
MeasureVector disruption_measures(const Network& net, const DemandTable& demand, MeasureKind kind,
                                  const MeasureOptions& opts = {});

/// Dispatches on family_of(kind); flow measures use all_or_nothing_flow.
MeasureVector compute_measure(const Network& net, const DemandTable& demand, MeasureKind kind,
                              const MeasureOptions& opts = {});

/// Descending by value, ties by ascending node id, undefined values last.
std::vector<std::pair<NodeId, std::optional<double>>> rank_nodes(const MeasureVector& v, std::size_t top_m);

}  // namespace fortifynet
