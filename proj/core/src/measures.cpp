#include "fortifynet/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "fortifynet/error.hpp"
#include "fortifynet/kshortest.hpp"

namespace fortifynet {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

using Matrix = std::vector<std::vector<double>>;

struct Info {
    MeasureKind kind;
    const char* name;
    MeasureCategory category;
    MeasureFamily family;
};

constexpr MeasureCategory C = MeasureCategory::Connectivity;
constexpr MeasureCategory A = MeasureCategory::Accessibility;
constexpr MeasureCategory K = MeasureCategory::Criticality;
constexpr MeasureFamily T = MeasureFamily::Topological;
constexpr MeasureFamily F = MeasureFamily::Flow;
constexpr MeasureFamily D = MeasureFamily::Disruption;

const Info kInfo[] = {
    {MeasureKind::DegreeCentrality, "DegreeCentrality", C, T},
    {MeasureKind::IndegreeCentrality, "IndegreeCentrality", C, T},
    {MeasureKind::OutdegreeCentrality, "OutdegreeCentrality", C, T},
    {MeasureKind::BetweennessCentrality, "BetweennessCentrality", A, T},
    {MeasureKind::ClosenessCentrality, "ClosenessCentrality", A, T},
    {MeasureKind::HarmonicCentrality, "HarmonicCentrality", A, T},
    {MeasureKind::EigenvectorCentrality, "EigenvectorCentrality", C, T},
    {MeasureKind::KatzCentrality, "KatzCentrality", A, T},
    {MeasureKind::PageRank, "PageRank", A, T},
    {MeasureKind::NeighborhoodConnectivity, "NeighborhoodConnectivity", C, T},
    {MeasureKind::GroupCentrality, "GroupCentrality", K, T},
    {MeasureKind::AggregateMeasure, "AggregateMeasure", A, T},
    {MeasureKind::AverageRating, "AverageRating", A, T},
    {MeasureKind::AveragePathDistance, "AveragePathDistance", K, T},
    {MeasureKind::AveragePathDistanceAfterDisruption, "AveragePathDistanceAfterDisruption", K, D},
    {MeasureKind::PhiNodeCentrality, "PhiNodeCentrality", C, F},
    {MeasureKind::ProportionalFlow, "ProportionalFlow", C, F},
    {MeasureKind::WeightedNode, "WeightedNode", C, F},
    {MeasureKind::WeightedNodeAfterDisruption, "WeightedNodeAfterDisruption", C, D},
    {MeasureKind::UndeliveredDemandAfterDisruption, "UndeliveredDemandAfterDisruption", K, D},
    {MeasureKind::PathDistanceChange, "PathDistanceChange", K, D},
    {MeasureKind::Segmentwise, "Segmentwise", K, D},
    {MeasureKind::Exposure, "Exposure", A, T},
    {MeasureKind::TsallisRedundancy, "TsallisRedundancy", K, F},
    {MeasureKind::StarTsallisRedundancy, "StarTsallisRedundancy", K, F},
    {MeasureKind::ComplexityMeasureTsallis, "ComplexityMeasureTsallis", K, T},
    {MeasureKind::ComplexityMeasureDistribution, "ComplexityMeasureDistribution", K, T},
};

const Info& info(MeasureKind k) { return kInfo[static_cast<int>(k)]; }

// Undirected neighbour sets by dense index.
std::vector<std::vector<std::size_t>> neighbours(const Network& net) {
    std::vector<std::set<std::size_t>> s(net.node_count());
    for (const Link& l : net.links()) {
        const auto a = net.index_of(l.tail), b = net.index_of(l.head);
        s[a].insert(b);
        s[b].insert(a);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& x : s) out.emplace_back(x.begin(), x.end());
    return out;
}

std::vector<double> in_degree(const Network& net) {
    std::vector<double> d(net.node_count(), 0);
    for (const Link& l : net.links()) d[net.index_of(l.head)] += 1;
    return d;
}

std::vector<double> out_degree(const Network& net) {
    std::vector<double> d(net.node_count(), 0);
    for (const Link& l : net.links()) d[net.index_of(l.tail)] += 1;
    return d;
}

std::vector<double> total_degree(const Network& net) {
    auto a = in_degree(net), b = out_degree(net);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

// Hop BFS from every source with shortest-path counts.
void bfs_counts(const Network& net, Matrix& dist, Matrix& sigma) {
    const std::size_t n = net.node_count();
    dist.assign(n, std::vector<double>(n, kInfD));
    sigma.assign(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<std::size_t>> succ(n);
    for (const Link& l : net.links()) succ[net.index_of(l.tail)].push_back(net.index_of(l.head));
    for (std::size_t s = 0; s < n; ++s) {
        dist[s][s] = 0;
        sigma[s][s] = 1;
        std::deque<std::size_t> q{s};
        while (!q.empty()) {
            auto u = q.front();
            q.pop_front();
            for (auto v : succ[u]) {
                if (dist[s][v] == kInfD) {
                    dist[s][v] = dist[s][u] + 1;
                    q.push_back(v);
                }
                if (dist[s][v] == dist[s][u] + 1) sigma[s][v] += sigma[s][u];
            }
        }
    }
}

std::vector<double> weighted_sssp(const Network& net, const LinkWeights& w, std::size_t src) {
    const std::size_t n = net.node_count();
    std::vector<double> dist(n, kInfD);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (int lid : net.out_links(net.nodes()[u])) {
            const auto v = net.index_of(net.link(lid).head);
            if (d + w[lid] < dist[v]) {
                dist[v] = d + w[lid];
                pq.emplace(dist[v], v);
            }
        }
    }
    return dist;
}

MeasureVector make(const Network& net, MeasureKind kind, const std::vector<std::optional<double>>& vals) {
    MeasureVector v;
    v.kind = kind;
    for (std::size_t i = 0; i < net.node_count(); ++i) v.values[net.nodes()[i]] = vals[i];
    return v;
}

std::vector<std::optional<double>> betweenness(const Network& net, const std::vector<std::pair<NodeId, NodeId>>& od) {
    const std::size_t n = net.node_count();
    Matrix dist, sigma;
    bfs_counts(net, dist, sigma);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (od.empty()) {
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t)
                if (s != t) pairs.emplace_back(s, t);
    } else {
        for (auto [o, d] : od)
            if (o != d && net.has_node(o) && net.has_node(d)) pairs.emplace_back(net.index_of(o), net.index_of(d));
    }
    std::vector<double> acc(n, 0.0);
    std::size_t counted = 0;
    for (auto [s, t] : pairs) {
        if (dist[s][t] == kInfD) continue;
        ++counted;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == s || i == t) continue;
            if (dist[s][i] + dist[i][t] == dist[s][t]) acc[i] += sigma[s][i] * sigma[i][t] / sigma[s][t];
        }
    }
    std::vector<std::optional<double>> out(n);
    if (counted == 0) return out;
    for (std::size_t i = 0; i < n; ++i) out[i] = acc[i] / static_cast<double>(counted);
    return out;
}

std::vector<std::optional<double>> harmonic(const Matrix& dist) {
    std::vector<std::optional<double>> out(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < dist.size(); ++j)
            if (j != i && dist[i][j] != kInfD) s += 1.0 / dist[i][j];
        out[i] = s;
    }
    return out;
}

std::vector<std::optional<double>> share(const std::vector<double>& num, double denom) {
    std::vector<std::optional<double>> out(num.size());
    if (denom == 0) return out;
    for (std::size_t i = 0; i < num.size(); ++i) out[i] = num[i] / denom;
    return out;
}

std::vector<std::optional<double>> eigenvector(const Network& net, const MeasureOptions& o,
                                               std::vector<std::string>& warn) {
    const std::size_t n = net.node_count();
    std::vector<std::optional<double>> out(n);
    if (n == 0) return out;
    const auto nb = neighbours(net);
    std::vector<double> x(n, 1.0 / n), y(n);
    double prev_delta = 0;
    bool converged = false;
    for (int it = 0; it < o.eigen_max_iterations; ++it) {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = x[i];
            for (auto j : nb[i]) y[i] += x[j];
            sum += y[i];
        }
        double delta = 0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] /= sum;
            delta = std::max(delta, std::abs(y[i] - x[i]));
        }
        x.swap(y);
        const double rho = (it > 0 && prev_delta > 0) ? std::min(delta / prev_delta, 0.999999) : 0.0;
        prev_delta = delta;
        if (delta == 0 || (it > 0 && delta <= o.eigen_tolerance * (1.0 - rho))) {
            converged = true;
            break;
        }
    }
    if (!converged) warn.push_back("eigenvector iteration hit the iteration cap");
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i];
    return out;
}

std::vector<std::optional<double>> katz(const Network& net, const MeasureOptions& o, std::vector<std::string>& warn) {
    const std::size_t n = net.node_count();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const Link& l : net.links()) succ[net.index_of(l.tail)].push_back(net.index_of(l.head));
    std::vector<double> v(n, 1.0), acc(n, 0.0);
    double scale = 1.0;
    for (int k = 1; k <= o.katz_horizon; ++k) {
        std::vector<double> nv(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (auto j : succ[i]) nv[i] += v[j];
        v.swap(nv);
        scale *= o.katz_alpha;
        for (std::size_t i = 0; i < n; ++i) acc[i] += scale * v[i];
    }
    // Spectral radius estimate from the growth of A^k 1.
    const double mass = std::accumulate(v.begin(), v.end(), 0.0);
    if (n > 0 && o.katz_horizon > 0 && mass > 0) {
        const double rho = std::pow(mass / n, 1.0 / o.katz_horizon);
        if (o.katz_alpha * rho >= 1.0) warn.push_back("katz series diverges (alpha >= 1/rho); truncated sum reported");
    }
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = acc[i];
    return out;
}

std::vector<std::optional<double>> pagerank(const Network& net, const MeasureOptions& o,
                                            std::vector<std::string>& warn) {
    const std::size_t n = net.node_count();
    std::vector<std::optional<double>> out(n);
    if (n == 0) return out;
    const auto od = out_degree(net);
    std::vector<double> pr(n, 1.0 / n);
    const double d = o.pagerank_damping;
    bool converged = false;
    for (int it = 0; it < o.pagerank_max_iterations; ++it) {
        double dangling = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (od[i] == 0) dangling += pr[i];
        std::vector<double> nx(n, (1.0 - d) / n + d * dangling / n);
        for (const Link& l : net.links()) {
            const auto t = net.index_of(l.tail);
            nx[net.index_of(l.head)] += d * pr[t] / od[t];
        }
        double delta = 0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(nx[i] - pr[i]);
        pr.swap(nx);
        if (delta < o.pagerank_tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) warn.push_back("pagerank iteration hit the iteration cap");
    for (std::size_t i = 0; i < n; ++i) out[i] = pr[i];
    return out;
}

FlowContext aon(const Network& net, const DemandTable& demand, const LinkWeights& w) {
    FlowContext fc;
    for (NodeId n : net.nodes()) {
        fc.node_flow[n] = 0;
        fc.delivered[n] = 0;
    }
    for (const Link& l : net.links()) fc.link_flow[l.id] = 0;
    for (const auto& e : demand.entries()) {
        if (e.effective <= 0 || !net.has_node(e.origin) || !net.has_node(e.destination)) continue;
        auto paths = k_shortest_paths(net, w, e.origin, e.destination, 1);
        if (paths.empty()) continue;
        for (NodeId v : paths[0].nodes) fc.node_flow[v] += e.effective;
        for (int lid : paths[0].links) fc.link_flow[lid] += e.effective;
        fc.delivered[e.destination] += e.effective;
    }
    return fc;
}

}  // namespace

const std::array<MeasureKind, 27>& all_measures() {
    static const std::array<MeasureKind, 27> all = [] {
        std::array<MeasureKind, 27> a{};
        for (int i = 0; i < 27; ++i) a[i] = kInfo[i].kind;
        return a;
    }();
    return all;
}

MeasureCategory category_of(MeasureKind k) { return info(k).category; }
MeasureFamily family_of(MeasureKind k) { return info(k).family; }
std::string measure_name(MeasureKind k) { return info(k).name; }

std::string category_name(MeasureCategory c) {
    switch (c) {
        case MeasureCategory::Connectivity: return "Connectivity";
        case MeasureCategory::Accessibility: return "Accessibility";
        case MeasureCategory::Criticality: return "Criticality";
    }
    return {};
}

std::optional<MeasureKind> parse_measure(const std::string& name) {
    auto lower = [](std::string s) {
        std::string r;
        for (char c : s)
            if (std::isalnum(static_cast<unsigned char>(c))) r += static_cast<char>(std::tolower(c));
        return r;
    };
    const std::string key = lower(name);
    for (const auto& i : kInfo)
        if (lower(i.name) == key) return i.kind;
    if (key == "degree") return MeasureKind::DegreeCentrality;
    return std::nullopt;
}

double FlowContext::total_delivered() const {
    double s = 0;
    for (const auto& [k, v] : delivered) s += v;
    return s;
}

FlowContext all_or_nothing_flow(const Network& net, const DemandTable& demand) {
    return aon(net, demand, free_flow_weights(net));
}

std::vector<std::vector<double>> hop_distances(const Network& net) {
    Matrix dist, sigma;
    bfs_counts(net, dist, sigma);
    return dist;
}

MeasureVector topological_measures(const Network& net, MeasureKind kind, const MeasureOptions& o) {
    if (family_of(kind) != MeasureFamily::Topological)
        throw ValidationError(measure_name(kind) + " is not a topological measure");
    const std::size_t n = net.node_count();
    std::vector<std::string> warn;
    std::vector<std::optional<double>> vals(n);
    const auto deg = total_degree(net);
    const double deg_sum = std::accumulate(deg.begin(), deg.end(), 0.0);

    switch (kind) {
        case MeasureKind::DegreeCentrality: vals = share(deg, deg_sum); break;
        case MeasureKind::IndegreeCentrality: vals = share(in_degree(net), deg_sum); break;
        case MeasureKind::OutdegreeCentrality: vals = share(out_degree(net), deg_sum); break;
        case MeasureKind::BetweennessCentrality: vals = betweenness(net, o.od_pairs); break;
        case MeasureKind::ClosenessCentrality: {
            const auto dist = hop_distances(net);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0;
                bool ok = true;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    if (dist[i][j] == kInfD) ok = false;
                    s += dist[i][j];
                }
                if (ok && s > 0) vals[i] = 1.0 / s;
            }
            break;
        }
        case MeasureKind::HarmonicCentrality: vals = harmonic(hop_distances(net)); break;
        case MeasureKind::EigenvectorCentrality: vals = eigenvector(net, o, warn); break;
        case MeasureKind::KatzCentrality: vals = katz(net, o, warn); break;
        case MeasureKind::PageRank: vals = pagerank(net, o, warn); break;
        case MeasureKind::NeighborhoodConnectivity: {
            const auto nb = neighbours(net);
            for (std::size_t i = 0; i < n; ++i) {
                if (nb[i].empty()) continue;
                double s = 0;
                for (auto j : nb[i]) s += deg[j];
                vals[i] = s / static_cast<double>(nb[i].size());
            }
            break;
        }
        case MeasureKind::GroupCentrality: {
            const auto bc = betweenness(net, o.od_pairs);
            if (n > 0 && !bc[0]) break;
            const auto nb = neighbours(net);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0;
                for (auto j : nb[i]) s += *bc[j];
                vals[i] = s;
            }
            break;
        }
        case MeasureKind::AggregateMeasure: {
            const auto dc = share(deg, deg_sum);
            const auto hc = harmonic(hop_distances(net));
            const auto bc = betweenness(net, o.od_pairs);
            if (n == 0 || !dc[0] || !bc[0]) break;
            auto mean = [&](const std::vector<std::optional<double>>& v) {
                double s = 0;
                for (auto& x : v) s += *x;
                return s / static_cast<double>(n);
            };
            const double mdc = mean(dc), mhc = mean(hc), mbc = mean(bc);
            auto dev = [](double x, double m) { return m == 0 ? 0.0 : (x - m) / m; };
            const auto& w = o.aggregate_weights;
            for (std::size_t i = 0; i < n; ++i)
                vals[i] = w[0] * dev(*dc[i], mdc) + w[1] * dev(*hc[i], mhc) + w[2] * dev(*bc[i], mbc);
            break;
        }
        case MeasureKind::AverageRating: {
            if (n == 0) break;
            const double mn = *std::min_element(deg.begin(), deg.end());
            if (mn > 0)
                for (auto& v : vals) v = 1.0 / (static_cast<double>(n) * mn);
            break;
        }
        case MeasureKind::AveragePathDistance: {
            const auto dist = hop_distances(net);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0;
                int c = 0;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i && dist[i][j] != kInfD) {
                        s += dist[i][j];
                        ++c;
                    }
                if (c > 0) vals[i] = s / c;
            }
            break;
        }
        case MeasureKind::Exposure: {
            if (n < 2) break;
            const auto before = hop_distances(net);
            for (std::size_t i = 0; i < n; ++i) {
                const NodeId id = net.nodes()[i];
                const Network g = net.without_node(id);
                const auto after = hop_distances(g);
                double s = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i) continue;
                    for (std::size_t l = 0; l < n; ++l) {
                        if (l == i || l == k) continue;
                        const double db = before[k][l];
                        const double da = after[g.index_of(net.nodes()[k])][g.index_of(net.nodes()[l])];
                        if (db != kInfD && da != kInfD) s += da - db;
                    }
                }
                vals[i] = s / (static_cast<double>(n) * static_cast<double>(n - 1));
            }
            break;
        }
        case MeasureKind::ComplexityMeasureTsallis: {
            const auto bc = betweenness(net, o.od_pairs);
            if (n == 0 || deg_sum == 0 || !bc[0]) break;
            double mx = 0;
            for (auto& b : bc) mx = std::max(mx, *b);
            for (std::size_t i = 0; i < n; ++i) {
                const double p = deg[i] / deg_sum;
                const double q = 1.0 + mx - *bc[i];
                if (p == 0)
                    vals[i] = 0.0;
                else if (std::abs(1.0 - q) < 1e-12)
                    vals[i] = -p * std::log(p);
                else
                    vals[i] = (std::pow(p, q) - p) / (1.0 - q);
            }
            break;
        }
        case MeasureKind::ComplexityMeasureDistribution: {
            if (deg_sum == 0) break;
            for (std::size_t i = 0; i < n; ++i) {
                const double p = deg[i] / deg_sum;
                vals[i] = p > 0 ? p * std::log(p) : 0.0;
            }
            break;
        }
        default: break;
    }
    auto mv = make(net, kind, vals);
    mv.warnings = std::move(warn);
    return mv;
}

MeasureVector flow_measures(const Network& net, const FlowContext& flow, MeasureKind kind, const MeasureOptions& o) {
    if (family_of(kind) != MeasureFamily::Flow) throw ValidationError(measure_name(kind) + " is not a flow measure");
    const double total = flow.total_delivered();
    if (!(total > 0)) throw ValidationError("flow context empty");
    const std::size_t n = net.node_count();
    auto f = [&](std::size_t i) {
        auto it = flow.node_flow.find(net.nodes()[i]);
        return it == flow.node_flow.end() ? 0.0 : it->second;
    };
    auto lf = [&](int lid) {
        auto it = flow.link_flow.find(lid);
        return it == flow.link_flow.end() ? 0.0 : it->second;
    };
    double fsum = 0;
    for (std::size_t i = 0; i < n; ++i) fsum += f(i);
    std::vector<std::optional<double>> vals(n);
    std::vector<std::optional<double>> bc;
    if (kind == MeasureKind::ProportionalFlow || kind == MeasureKind::WeightedNode) bc = betweenness(net, o.od_pairs);

    for (std::size_t i = 0; i < n; ++i) {
        const NodeId id = net.nodes()[i];
        switch (kind) {
            case MeasureKind::PhiNodeCentrality: vals[i] = f(i) / total; break;
            case MeasureKind::ProportionalFlow:
                if (bc[i] && fsum > 0) vals[i] = (f(i) / fsum + *bc[i]) / 2.0;
                break;
            case MeasureKind::WeightedNode:
                if (bc[i]) vals[i] = (f(i) / total + *bc[i]) / 2.0;
                break;
            case MeasureKind::TsallisRedundancy: {
                if (f(i) <= 0) break;
                double s = 0;
                for (int lid : net.out_links(id)) {
                    const double r = lf(lid) / f(i);
                    s += r - r * r;
                }
                vals[i] = s / (o.tsallis_em - 1.0);
                break;
            }
            case MeasureKind::StarTsallisRedundancy: {
                if (fsum <= 0) break;
                double s1 = 0, s2 = 0;
                for (int lid : net.out_links(id)) {
                    const double p = lf(lid) / fsum;
                    s1 += p;
                    s2 += p * p;
                }
                vals[i] = (s1 - s2) / (o.tsallis_em - 1.0);
                break;
            }
            default: break;
        }
    }
    return make(net, kind, vals);
}

MeasureVector disruption_measures(const Network& net, const DemandTable& demand, MeasureKind kind,
                                  const MeasureOptions& o) {
    if (family_of(kind) != MeasureFamily::Disruption)
        throw ValidationError(measure_name(kind) + " is not a disruption measure");
    const std::size_t n = net.node_count();
    const LinkWeights w = free_flow_weights(net);

    struct Pair {
        NodeId o, d;
        double demand;
    };
    std::vector<Pair> pairs;
    for (const auto& e : demand.entries())
        if (net.has_node(e.origin) && net.has_node(e.destination) && e.origin != e.destination)
            pairs.push_back({e.origin, e.destination, e.effective});

    auto od_dist = [&](const Network& g) {
        std::map<NodeId, std::vector<double>> by_origin;
        std::vector<double> out;
        for (const auto& p : pairs) {
            if (!g.has_node(p.o) || !g.has_node(p.d)) {
                out.push_back(kInfD);
                continue;
            }
            auto it = by_origin.find(p.o);
            if (it == by_origin.end()) it = by_origin.emplace(p.o, weighted_sssp(g, w, g.index_of(p.o))).first;
            out.push_back(it->second[g.index_of(p.d)]);
        }
        return out;
    };

    const auto before = od_dist(net);
    double delivered_before = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (before[k] != kInfD) delivered_before += pairs[k].demand;
    const FlowContext flow0 = aon(net, demand, w);
    const double total0 = flow0.total_delivered();

    std::vector<std::optional<double>> vals(n);
    for (std::size_t j = 0; j < n; ++j) {
        const NodeId id = net.nodes()[j];
        const Network g = net.without_node(id);
        const auto after = od_dist(g);
        double delivered_after = 0, sum_a = 0, sum_b = 0, sum_apd = 0;
        int both = 0, apd_n = 0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (after[k] == kInfD) continue;
            delivered_after += pairs[k].demand;
            sum_apd += after[k];
            ++apd_n;
            if (before[k] != kInfD) {
                sum_a += after[k];
                sum_b += before[k];
                ++both;
            }
        }
        const std::optional<double> dd = both > 0 ? std::optional<double>((sum_a - sum_b) / both) : std::nullopt;
        switch (kind) {
            case MeasureKind::UndeliveredDemandAfterDisruption: vals[j] = delivered_after - delivered_before; break;
            case MeasureKind::AveragePathDistanceAfterDisruption:
                if (apd_n > 0) vals[j] = sum_apd / apd_n;
                break;
            case MeasureKind::PathDistanceChange: vals[j] = dd; break;
            case MeasureKind::Segmentwise:
                if (dd && total0 > 0) vals[j] = (flow0.node_flow.at(id) / total0) * *dd;
                break;
            case MeasureKind::WeightedNodeAfterDisruption: {
                if (n < 2 || total0 <= 0) break;
                std::vector<OdDemand> rows;
                for (const auto& e : demand.entries())
                    if (e.origin != id && e.destination != id) rows.push_back({e.origin, e.destination, e.effective, 0});
                const FlowContext fj = aon(g, DemandTable(rows, 1.0), w);
                std::vector<std::pair<NodeId, NodeId>> od;
                for (auto [a, b] : o.od_pairs)
                    if (a != id && b != id) od.emplace_back(a, b);
                if (!o.od_pairs.empty() && od.empty()) break;
                const auto bc = betweenness(g, od);
                if (!bc[0]) break;
                double s = 0;
                for (std::size_t i = 0; i < g.node_count(); ++i)
                    s += (fj.node_flow.at(g.nodes()[i]) / total0 + *bc[i]) / 2.0;
                vals[j] = s / static_cast<double>(g.node_count());
                break;
            }
            default: break;
        }
    }
    return make(net, kind, vals);
}

MeasureVector compute_measure(const Network& net, const DemandTable& demand, MeasureKind kind,
                              const MeasureOptions& opts) {
    switch (family_of(kind)) {
        case MeasureFamily::Topological: return topological_measures(net, kind, opts);
        case MeasureFamily::Flow: return flow_measures(net, all_or_nothing_flow(net, demand), kind, opts);
        case MeasureFamily::Disruption: return disruption_measures(net, demand, kind, opts);
    }
    throw ValidationError("unknown measure family");
}

std::vector<std::pair<NodeId, std::optional<double>>> rank_nodes(const MeasureVector& v, std::size_t top_m) {
    if (top_m > v.values.size()) throw ValidationError("top_m exceeds the number of nodes");
    std::vector<std::pair<NodeId, std::optional<double>>> all(v.values.begin(), v.values.end());
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second.has_value() != b.second.has_value()) return a.second.has_value();
        if (a.second && *a.second != *b.second) return *a.second > *b.second;
        return a.first < b.first;
    });
    all.resize(top_m);
    return all;
}

}  // namespace fortifynet
