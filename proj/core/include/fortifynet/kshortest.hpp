#pragma once

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fortifynet/network.hpp"

namespace fortifynet {

/// Per-link weights indexed by link id (entry 0 unused).
using LinkWeights = std::vector<double>;

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

LinkWeights free_flow_weights(const Network& net);
LinkWeights unit_weights(const Network& net);

struct Path {
    std::vector<int> links;     ///< link ids in travel order
    std::vector<NodeId> nodes;  ///< links.size() + 1 nodes (one node for an empty path)
    double cost = 0.0;

    bool operator==(const Path& o) const { return links == o.links && nodes == o.nodes; }
};

struct ShortestTree {
    std::map<NodeId, double> dist;  ///< kUnreachable when the target cannot be reached
    std::map<NodeId, int> pred;     ///< next link on a shortest path toward the target; 0 at the target or when unreachable
};

ShortestTree dijkstra_to_target(const Network& net, const LinkWeights& weights, NodeId target);

/// Up to k loopless source->target paths in nondecreasing cost; equal costs ordered by node sequence.
std::vector<Path> k_shortest_paths(const Network& net, const LinkWeights& weights, NodeId source, NodeId target,
                                   int k);

struct OdRoutes {
    NodeId origin = 0;
    NodeId destination = 0;
    std::vector<Path> routes;  ///< index r = position + 1
};

class RouteSet {
public:
    RouteSet() = default;
    explicit RouteSet(std::vector<OdRoutes> pairs) : pairs_(std::move(pairs)) {}

    const std::vector<OdRoutes>& pairs() const { return pairs_; }
    const OdRoutes* find(NodeId o, NodeId d) const;
    std::size_t route_count() const;

    /// `{"(o,d)": [[[tail,head], ...], ...]}`
    std::string to_json() const;

private:
    std::vector<OdRoutes> pairs_;
};

RouteSet build_route_sets(const Network& net, const DemandTable& demand, const LinkWeights& weights, int k);

}  // namespace fortifynet
