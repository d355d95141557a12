#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "fortifynet/error.hpp"
#include "fortifynet/measures.hpp"
#include "measure_oracle.hpp"

using namespace fortifynet;
using namespace fortifynet::testing;

namespace {

const std::vector<MeasureKind>& topological_kinds() {
    static const std::vector<MeasureKind> k = [] {
        std::vector<MeasureKind> v;
        for (MeasureKind m : all_measures())
            if (family_of(m) == MeasureFamily::Topological) v.push_back(m);
        return v;
    }();
    return k;
}

Network both_ways(const std::vector<std::pair<NodeId, NodeId>>& edges) {
    std::vector<Arc> arcs;
    for (auto [a, b] : edges) {
        arcs.push_back({a, b});
        arcs.push_back({b, a});
    }
    return make_network(arcs);
}

void expect_same(const MeasureVector& got, const std::map<NodeId, std::optional<double>>& want, double tol,
                 const std::string& ctx) {
    ASSERT_EQ(got.values.size(), want.size()) << ctx;
    for (const auto& [n, v] : want) {
        const auto& g = got.values.at(n);
        ASSERT_EQ(g.has_value(), v.has_value()) << ctx << " node " << n;
        if (v) EXPECT_NEAR(*g, *v, tol) << ctx << " node " << n;
    }
}

}  // namespace

TEST(MeasureCatalog, CategoriesAndNames) {
    EXPECT_EQ(all_measures().size(), 27u);
    int counts[3] = {0, 0, 0};
    std::set<std::string> names;
    for (MeasureKind k : all_measures()) {
        ++counts[static_cast<int>(category_of(k))];
        names.insert(measure_name(k));
        EXPECT_EQ(parse_measure(measure_name(k)), k);
    }
    EXPECT_EQ(names.size(), 27u);
    EXPECT_EQ(counts[0], 9);   // connectivity
    EXPECT_EQ(counts[1], 8);   // accessibility
    EXPECT_EQ(counts[2], 10);  // criticality
    EXPECT_EQ(category_of(MeasureKind::BetweennessCentrality), MeasureCategory::Accessibility);
    EXPECT_EQ(category_of(MeasureKind::GroupCentrality), MeasureCategory::Criticality);
    EXPECT_EQ(category_of(MeasureKind::WeightedNode), MeasureCategory::Connectivity);
    EXPECT_FALSE(parse_measure("NoSuchMeasure"));
}

TEST(Topological, TriangleDegree) {
    const Network net = both_ways({{1, 2}, {2, 3}, {1, 3}});
    const auto v = topological_measures(net, MeasureKind::DegreeCentrality);
    for (auto& [n, x] : v.values) EXPECT_NEAR(*x, 1.0 / 3, 1e-15);
}

TEST(Topological, PathIndegree) {
    const Network net = make_network({{1, 2}, {2, 3}});
    const auto v = topological_measures(net, MeasureKind::IndegreeCentrality);
    EXPECT_DOUBLE_EQ(*v.values.at(1), 0.0);
    EXPECT_DOUBLE_EQ(*v.values.at(2), 0.25);
    EXPECT_DOUBLE_EQ(*v.values.at(3), 0.25);
}

TEST(Topological, DegreeSumsToOne) {
    std::mt19937 rng(3);
    for (int t = 0; t < 30; ++t) {
        const Network net = random_graph(rng, 6, 0.4);
        if (net.link_count() == 0) continue;
        double s = 0;
        for (auto& [n, x] : topological_measures(net, MeasureKind::DegreeCentrality).values) s += *x;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Topological, SiouxFallsNodeTenHighDegree) {
    const auto v = topological_measures(sioux_falls(), MeasureKind::DegreeCentrality);
    const auto top = rank_nodes(v, 3);
    bool found = false;
    for (auto& [n, x] : top) found |= n == 10;
    EXPECT_TRUE(found);
}

TEST(Topological, DisconnectedGraphUndefinedCloseness) {
    const Network net = make_network({{1, 2}, {2, 1}}, {3});
    const auto c = topological_measures(net, MeasureKind::ClosenessCentrality);
    EXPECT_FALSE(c.values.at(1).has_value());
    EXPECT_FALSE(c.values.at(3).has_value());
    const auto h = topological_measures(net, MeasureKind::HarmonicCentrality);
    EXPECT_DOUBLE_EQ(*h.values.at(1), 1.0);
    EXPECT_DOUBLE_EQ(*h.values.at(3), 0.0);
}

TEST(Topological, KatzDivergenceWarns) {
    const Network net = both_ways({{1, 2}, {2, 3}, {1, 3}, {3, 4}, {1, 4}, {2, 4}});
    EXPECT_FALSE(topological_measures(net, MeasureKind::KatzCentrality).warnings.empty());
    const Network line = make_network({{1, 2}, {2, 3}});
    EXPECT_TRUE(topological_measures(line, MeasureKind::KatzCentrality).warnings.empty());
}

TEST(Topological, RejectsOtherFamilies) {
    EXPECT_THROW(topological_measures(sioux_falls(), MeasureKind::PhiNodeCentrality), ValidationError);
}

// Every topological measure against the independent oracle, all-pairs and OD-restricted betweenness.
TEST(Topological, RandomGraphsMatchOracle) {
    std::mt19937 rng(11);
    for (int t = 0; t < 60; ++t) {
        const int n = 1 + t % 6;
        const Network net = random_graph(rng, n, 0.2 + 0.1 * (t % 5));
        MeasureOptions od;
        if (n >= 2) od.od_pairs = {{1, n}, {n, 1}};
        for (const MeasureOptions& o : {MeasureOptions{}, od})
            for (MeasureKind k : topological_kinds())
                expect_same(topological_measures(net, k, o), oracle::topological(net, k, o), 1e-9,
                            measure_name(k) + " trial " + std::to_string(t));
    }
}

TEST(Topological, EigenAndPageRankNonnegative) {
    std::mt19937 rng(5);
    for (int t = 0; t < 40; ++t) {
        const Network net = random_graph(rng, 6, 0.3);
        double s = 0;
        for (auto& [n, x] : topological_measures(net, MeasureKind::EigenvectorCentrality).values) {
            EXPECT_GE(*x, 0.0);
            s += *x;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
        for (auto& [n, x] : topological_measures(net, MeasureKind::PageRank).values) EXPECT_GE(*x, 0.0);
    }
}

TEST(Flow, AllFlowThroughOneNode) {
    const Network net = make_network({{1, 2}});
    FlowContext fc;
    fc.node_flow = {{1, 5}, {2, 5}};
    fc.delivered = {{2, 5}};
    fc.link_flow = {{1, 5}};
    const auto v = flow_measures(net, fc, MeasureKind::PhiNodeCentrality);
    EXPECT_DOUBLE_EQ(*v.values.at(2), 1.0);
}

TEST(Flow, WeightedNodeIsMean) {
    // Path 1->2->3 with demand 1->3: BC_2 = 1, phi_2 = 1.
    const Network net = make_network({{1, 2}, {2, 3}});
    FlowContext fc;
    fc.node_flow = {{1, 4}, {2, 4}, {3, 4}};
    fc.delivered = {{3, 10}};
    MeasureOptions o;
    o.od_pairs = {{1, 3}};
    const auto w = flow_measures(net, fc, MeasureKind::WeightedNode, o);
    EXPECT_DOUBLE_EQ(*w.values.at(2), (0.4 + 1.0) / 2);
    EXPECT_DOUBLE_EQ(*w.values.at(1), (0.4 + 0.0) / 2);
}

TEST(Flow, StarTsallisByHand) {
    // Centre 1 relays to three leaves with equal flows.
    const Network net = make_network({{1, 2}, {1, 3}, {1, 4}});
    FlowContext fc;
    fc.node_flow = {{1, 3}, {2, 1}, {3, 1}, {4, 1}};
    fc.delivered = {{2, 1}, {3, 1}, {4, 1}};
    fc.link_flow = {{1, 1}, {2, 1}, {3, 1}};
    const auto q = flow_measures(net, fc, MeasureKind::TsallisRedundancy);
    const double r = 1.0 / 3;
    EXPECT_NEAR(*q.values.at(1), 3 * (r - r * r) / 0.43, 1e-12);
    EXPECT_NEAR(*q.values.at(2), 0.0, 1e-15);
}

TEST(Flow, EmptyContextRejected) {
    const Network net = make_network({{1, 2}});
    FlowContext fc;
    fc.node_flow = {{1, 0}, {2, 0}};
    EXPECT_THROW(flow_measures(net, fc, MeasureKind::PhiNodeCentrality), ValidationError);
}

TEST(Flow, AllOrNothingConservesDemand) {
    const auto fc = all_or_nothing_flow(sioux_falls(), sioux_falls_demand());
    EXPECT_NEAR(fc.total_delivered(), sioux_falls_demand().total(), 1e-9);
    for (auto& [n, f] : fc.node_flow) EXPECT_GE(f, 0.0);
}

TEST(Disruption, LineCutLosesAllDemand) {
    const Network net = make_network({{1, 2}, {2, 3}, {3, 4}});
    const DemandTable d = load_demand("origin,destination,demand\n1,4,7\n", 1.0);
    const auto v = disruption_measures(net, d, MeasureKind::UndeliveredDemandAfterDisruption);
    EXPECT_DOUBLE_EQ(*v.values.at(2), -7.0);
    EXPECT_DOUBLE_EQ(*v.values.at(3), -7.0);
}

TEST(Disruption, UnusedLeafIsNeutral) {
    const Network net = make_network({{1, 2}, {2, 3}, {2, 5}, {5, 2}});
    const DemandTable d = load_demand("origin,destination,demand\n1,3,4\n", 1.0);
    for (MeasureKind k : {MeasureKind::UndeliveredDemandAfterDisruption, MeasureKind::PathDistanceChange,
                          MeasureKind::Segmentwise}) {
        const auto v = disruption_measures(net, d, k);
        EXPECT_DOUBLE_EQ(*v.values.at(5), 0.0) << measure_name(k);
    }
}

TEST(Disruption, DetourLength) {
    // Direct 1-2-3 (cost 2) and detour 1-4-5-3 (cost 3).
    const Network net = make_network({{1, 2}, {2, 3}, {1, 4}, {4, 5}, {5, 3}});
    const DemandTable d = load_demand("origin,destination,demand\n1,3,1\n", 1.0);
    const auto v = disruption_measures(net, d, MeasureKind::PathDistanceChange);
    EXPECT_DOUBLE_EQ(*v.values.at(2), 1.0);
    EXPECT_DOUBLE_EQ(*v.values.at(4), 0.0);
}

TEST(Disruption, ZeroBetweennessZeroFlowNodesAreZero) {
    std::mt19937 rng(99);
    for (int t = 0; t < 40; ++t) {
        const Network net = random_graph(rng, 6, 0.35);
        const DemandTable d = load_demand("origin,destination,demand\n1,6,3\n2,5,1\n", 1.0);
        MeasureOptions o;
        o.od_pairs = {{1, 6}, {2, 5}};
        const auto bc = topological_measures(net, MeasureKind::BetweennessCentrality, o);
        const auto fc = all_or_nothing_flow(net, d);
        for (NodeId n : net.nodes()) {
            if (n == 1 || n == 6 || n == 2 || n == 5) continue;
            if (!bc.values.at(n) || *bc.values.at(n) != 0.0 || fc.node_flow.at(n) != 0.0) continue;
            for (MeasureKind k : {MeasureKind::UndeliveredDemandAfterDisruption, MeasureKind::PathDistanceChange,
                                  MeasureKind::Segmentwise}) {
                const auto v = disruption_measures(net, d, k, o).values.at(n);
                if (v) EXPECT_DOUBLE_EQ(*v, 0.0) << measure_name(k) << " trial " << t << " node " << n;
            }
        }
    }
}

TEST(Disruption, AllMeasuresDefinedOnSiouxFalls) {
    MeasureOptions o;
    for (const auto& e : sioux_falls_demand().entries()) o.od_pairs.emplace_back(e.origin, e.destination);
    for (MeasureKind k : all_measures()) {
        const auto v = compute_measure(sioux_falls(), sioux_falls_demand(), k, o);
        EXPECT_EQ(v.values.size(), 24u) << measure_name(k);
        for (auto& [n, x] : v.values)
            if (x) EXPECT_TRUE(std::isfinite(*x)) << measure_name(k);
    }
}

TEST(Ranking, TieBreakById) {
    MeasureVector v;
    v.values = {{2, 0.5}, {1, 0.5}, {3, 0.1}};
    const auto r = rank_nodes(v, 2);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].first, 1);
    EXPECT_EQ(r[1].first, 2);
    EXPECT_EQ(rank_nodes(v, 3).size(), 3u);
    EXPECT_THROW(rank_nodes(v, 4), ValidationError);
}

TEST(Ranking, UndefinedLast) {
    MeasureVector v;
    v.values = {{1, std::nullopt}, {2, -1.0}, {3, 0.0}};
    const auto r = rank_nodes(v, 3);
    EXPECT_EQ(r[0].first, 3);
    EXPECT_EQ(r[1].first, 2);
    EXPECT_EQ(r[2].first, 1);
}

TEST(Ranking, NeighborhoodConnectivityTopEight) {
    const auto v = topological_measures(sioux_falls(), MeasureKind::NeighborhoodConnectivity);
    EXPECT_EQ(rank_nodes(v, 8).size(), 8u);
}
