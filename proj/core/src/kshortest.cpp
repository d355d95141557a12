#include "fortifynet/kshortest.hpp"

#include <algorithm>
#include <memory>
#include <queue>

#include "json.hpp"

#include "fortifynet/error.hpp"

namespace fortifynet {

namespace {

void check_weights(const Network& net, const LinkWeights& w) {
    for (const Link& l : net.links()) {
        if (static_cast<std::size_t>(l.id) >= w.size()) throw ValidationError("no weight for link " + std::to_string(l.id));
        if (!(w[l.id] >= 0)) throw ValidationError("negative weight on link " + std::to_string(l.id));
    }
}

// Dense-index Dijkstra on reversed links.
std::vector<double> dist_to(const Network& net, const LinkWeights& w, NodeId target, std::vector<int>* pred) {
    const std::size_t n = net.node_count();
    std::vector<double> dist(n, kUnreachable);
    if (pred) pred->assign(n, 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const std::size_t t = net.index_of(target);
    dist[t] = 0;
    pq.emplace(0.0, t);
    const auto& nodes = net.nodes();
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (int lid : net.in_links(nodes[u])) {
            const Link& l = net.link(lid);
            const std::size_t v = net.index_of(l.tail);
            const double nd = d + w[lid];
            if (nd < dist[v] || (pred && nd == dist[v] && lid < (*pred)[v])) {
                const bool improved = nd < dist[v];
                dist[v] = nd;
                if (pred) (*pred)[v] = lid;
                if (improved) pq.emplace(nd, v);
            }
        }
    }
    return dist;
}

struct Partial {
    double key;   // accumulated reduced cost
    double cost;  // accumulated real cost
    std::vector<NodeId> nodes;
    std::vector<int> links;
};

struct PartialGreater {
    bool operator()(const std::shared_ptr<Partial>& a, const std::shared_ptr<Partial>& b) const {
        if (a->key != b->key) return a->key > b->key;
        return b->nodes < a->nodes;
    }
};

}  // namespace

LinkWeights free_flow_weights(const Network& net) {
    int max_id = 0;
    for (const Link& l : net.links()) max_id = std::max(max_id, l.id);
    LinkWeights w(static_cast<std::size_t>(max_id) + 1, 0.0);
    for (const Link& l : net.links()) w[l.id] = l.free_flow_time;
    return w;
}

LinkWeights unit_weights(const Network& net) {
    int max_id = 0;
    for (const Link& l : net.links()) max_id = std::max(max_id, l.id);
    LinkWeights w(static_cast<std::size_t>(max_id) + 1, 0.0);
    for (const Link& l : net.links()) w[l.id] = 1.0;
    return w;
}

ShortestTree dijkstra_to_target(const Network& net, const LinkWeights& weights, NodeId target) {
    check_weights(net, weights);
    std::vector<int> pred;
    auto dist = dist_to(net, weights, target, &pred);
    ShortestTree tree;
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        tree.dist[net.nodes()[i]] = dist[i];
        tree.pred[net.nodes()[i]] = pred[i];
    }
    return tree;
}

std::vector<Path> k_shortest_paths(const Network& net, const LinkWeights& weights, NodeId source, NodeId target,
                                   int k) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (!net.has_node(source)) throw ValidationError("unknown source node " + std::to_string(source));
    if (!net.has_node(target)) throw ValidationError("unknown target node " + std::to_string(target));
    check_weights(net, weights);

    std::vector<Path> out;
    if (source == target) {
        out.push_back(Path{{}, {source}, 0.0});
        return out;
    }
    const auto dist = dist_to(net, weights, target, nullptr);
    const double d_src = dist[net.index_of(source)];
    if (d_src == kUnreachable) return out;

    std::priority_queue<std::shared_ptr<Partial>, std::vector<std::shared_ptr<Partial>>, PartialGreater> queue;
    queue.push(std::make_shared<Partial>(Partial{0.0, 0.0, {source}, {}}));
    while (!queue.empty() && static_cast<int>(out.size()) < k) {
        auto p = queue.top();
        queue.pop();
        const NodeId node = p->nodes.back();
        if (node == target) {
            out.push_back(Path{p->links, p->nodes, p->cost});
            continue;
        }
        const double d_node = dist[net.index_of(node)];
        for (int lid : net.out_links(node)) {
            const Link& l = net.link(lid);
            const double d_v = dist[net.index_of(l.head)];
            if (d_v == kUnreachable) continue;
            if (std::find(p->nodes.begin(), p->nodes.end(), l.head) != p->nodes.end()) continue;
            auto q = std::make_shared<Partial>(*p);
            q->key = p->key + weights[lid] - d_node + d_v;
            q->cost = p->cost + weights[lid];
            q->nodes.push_back(l.head);
            q->links.push_back(lid);
            queue.push(std::move(q));
        }
    }
    return out;
}

const OdRoutes* RouteSet::find(NodeId o, NodeId d) const {
    for (const auto& p : pairs_)
        if (p.origin == o && p.destination == d) return &p;
    return nullptr;
}

std::size_t RouteSet::route_count() const {
    std::size_t n = 0;
    for (const auto& p : pairs_) n += p.routes.size();
    return n;
}

std::string RouteSet::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& p : pairs_) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : p.routes) {
            auto edges = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) edges.push_back({r.nodes[i], r.nodes[i + 1]});
            arr.push_back(edges);
        }
        j["(" + std::to_string(p.origin) + "," + std::to_string(p.destination) + ")"] = arr;
    }
    return j.dump(1);
}

RouteSet build_route_sets(const Network& net, const DemandTable& demand, const LinkWeights& weights, int k) {
    std::vector<OdRoutes> pairs;
    for (const auto& e : demand.entries()) {
        OdRoutes r{e.origin, e.destination, k_shortest_paths(net, weights, e.origin, e.destination, k)};
        if (r.routes.empty())
            throw ValidationError("OD pair (" + std::to_string(e.origin) + "," + std::to_string(e.destination) +
                                  ") is disconnected");
        pairs.push_back(std::move(r));
    }
    return RouteSet(std::move(pairs));
}

}  // namespace fortifynet
