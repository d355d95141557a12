#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace fortifynet::testing {

std::string data_path(const std::string& name) { return std::string(FORTIFYNET_TEST_DATA_DIR) + "/" + name; }
std::string golden_path(const std::string& name) { return std::string(FORTIFYNET_TEST_GOLDEN_DIR) + "/" + name; }

const Network& sioux_falls() {
    static const Network net = parse_tntp(read_file(data_path("sioux_falls/SiouxFalls_net.tntp")));
    return net;
}

const DemandTable& sioux_falls_demand() {
    static const DemandTable d = load_demand(read_file(data_path("sioux_falls/demand.csv")), 100.0);
    return d;
}

FortificationParams sioux_falls_fortification() {
    return parse_fortification(read_file(data_path("sioux_falls/fortification.json")));
}

Network make_network(const std::vector<Arc>& arcs, std::vector<NodeId> extra_nodes) {
    std::set<NodeId> ids(extra_nodes.begin(), extra_nodes.end());
    std::vector<Link> links;
    int id = 1;
    for (const Arc& a : arcs) {
        ids.insert(a.tail);
        ids.insert(a.head);
        Link l;
        l.id = id++;
        l.tail = a.tail;
        l.head = a.head;
        l.free_flow_time = a.t0;
        l.capacity = a.capacity;
        links.push_back(l);
    }
    return Network({ids.begin(), ids.end()}, links);
}

Network random_graph(std::mt19937& rng, int n, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<Arc> arcs;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j && coin(rng)) arcs.push_back({i, j, 1.0, 1.0});
    std::vector<NodeId> all;
    for (int i = 1; i <= n; ++i) all.push_back(i);
    return make_network(arcs, all);
}

SolverConfig test_solver() {
    const std::string exe = default_solver_executable();
    SolverConfig cfg = exe.empty() ? SolverConfig{} : solver_config_for(exe);
    cfg.time_limit = 120;
    cfg.gap_tolerance = 1e-9;
    return cfg;
}

bool solver_available() {
    const std::string exe = default_solver_executable();
    return !exe.empty() && std::system(("test -x '" + exe + "'").c_str()) == 0;
}

std::string TinyInstance::describe() const {
    std::ostringstream os;
    os << model_name(kind) << " links:";
    for (const Link& l : net.links())
        os << " " << l.tail << "->" << l.head << "(t0=" << l.free_flow_time << ",V=" << l.capacity << ")";
    os << " demand:";
    for (const auto& e : demand.entries()) os << " (" << e.origin << "," << e.destination << ")=" << e.effective;
    os << " scenarios:";
    for (const auto& s : scenarios.scenarios) {
        os << " [" << s.id << " p=" << s.probability;
        for (auto [n, r] : s.affected) os << " " << n << ":" << r;
        os << "]";
    }
    os << " budget=" << fort.budget << " w=(" << weights.w1 << "," << weights.w2 << "," << weights.w3 << ")";
    return os.str();
}

ModelInput TinyInstance::input(int pla_segments, PlaEncoding enc) const {
    ModelInput in{net, demand, routes, nullptr, nullptr, weights, risk, {}};
    if (kind != ModelKind::Baseline) {
        in.scenarios = &scenarios;
        in.fort = &fort;
    }
    in.options.pla_segments = pla_segments;
    in.options.encoding = enc;
    return in;
}

TinyInstance random_tiny_instance(std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto pick = [&](double lo, double hi) { return std::round((lo + (hi - lo) * u01(rng)) * 4) / 4; };

    TinyInstance inst;
    std::vector<Arc> arcs{{1, 2}, {2, 4}};
    std::vector<std::pair<NodeId, NodeId>> pool{{1, 3}, {3, 4}, {2, 3}, {1, 4}, {3, 2}};
    std::shuffle(pool.begin(), pool.end(), rng);
    const int extra = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < extra; ++i) arcs.push_back({pool[i].first, pool[i].second});
    for (Arc& a : arcs) {
        a.t0 = pick(1.0, 4.0);
        a.capacity = pick(0.5, 3.0);
    }
    inst.net = make_network(arcs, {1, 2, 3, 4});

    std::vector<OdDemand> od{{1, 4, pick(1.0, 2.0), 0}};
    const auto probe = k_shortest_paths(inst.net, unit_weights(inst.net), 2, 4, 2);
    if (!probe.empty() && rng() % 2 == 0) od.push_back({2, 4, pick(0.5, 1.0), 0});
    inst.demand = DemandTable(od, 1.0);

    std::vector<OdRoutes> pairs;
    for (std::size_t i = 0; i < od.size(); ++i) {
        const int k = i == 0 ? 3 : 2;
        pairs.push_back({od[i].origin, od[i].destination,
                         k_shortest_paths(inst.net, unit_weights(inst.net), od[i].origin, od[i].destination, k)});
    }
    inst.routes = RouteSet(pairs);

    const int n_scen = 1 + static_cast<int>(rng() % 2);
    const double rates[] = {0.3, 0.5, 0.8, 1.0};
    double psum = 0;
    for (int s = 0; s < n_scen; ++s) {
        Scenario sc;
        sc.id = "xi_" + std::to_string(s + 1);
        const int n_aff = 1 + static_cast<int>(rng() % 2);
        for (int a = 0; a < n_aff; ++a) sc.affected[1 + static_cast<int>(rng() % 4)] = rates[rng() % 4];
        sc.probability = 0.2 + u01(rng);
        psum += sc.probability;
        inst.scenarios.scenarios.push_back(sc);
    }
    for (auto& sc : inst.scenarios.scenarios) sc.probability /= psum;

    for (NodeId n : inst.net.nodes()) inst.fort.cost[n] = 1.0 + static_cast<double>(rng() % 3);
    inst.fort.budget = static_cast<int>(rng() % 3);

    const ModelKind kinds[] = {ModelKind::Baseline, ModelKind::RiskNeutral, ModelKind::RiskAverse, ModelKind::Hybrid};
    inst.kind = kinds[rng() % 4];
    inst.weights.w1 = pick(0.2, 0.6);
    inst.weights.w3 = pick(0.0, 0.2);
    inst.weights.w2 = 1.0 - inst.weights.w1 - inst.weights.w3;
    inst.weights.z_normalizer = max_free_flow_route_time(inst.net, inst.routes);
    inst.weights.demand_normalizer = inst.demand.total();
    double cmax = 0;
    for (auto [n, c] : inst.fort.cost) cmax = std::max(cmax, c);
    inst.weights.cost_normalizer = cmax;
    inst.risk.epsilon = n_scen == 1 ? 0.5 : 0.1 + 0.8 * u01(rng);
    inst.risk.delta = pick(0.0, 1.0);
    return inst;
}

OracleComparison compare_with_oracle(const TinyInstance& inst, const SolverConfig& cfg) {
    OracleComparison c;
    const ModelInput in = inst.input();
    const BuiltModel built = build_model(inst.kind, in);
    const RawSolution raw = solve(built.model, cfg);
    const Solution sol = extract_solution(built, raw, in);
    const OracleResult orc = oracle_solve(inst.kind, in, inst.grid);
    c.milp = sol.objective;
    c.oracle = orc.objective;
    c.pla_slack = inst.weights.w1 / inst.weights.z_normalizer * built.route_time_error_bound;
    double routes = 0;
    for (const auto& p : inst.routes.pairs()) routes += static_cast<double>(p.routes.size());
    c.grid_slack = inst.weights.w2 * routes * inst.grid / inst.weights.demand_normalizer;
    const double tol = 1e-6;
    std::ostringstream os;
    if (sol.status != SolveStatus::Optimal) {
        os << "solver status " << status_name(sol.status);
    } else {
        const bool upper = c.milp <= c.oracle + c.pla_slack + tol;
        const bool lower = c.oracle <= c.milp + c.grid_slack + tol;
        c.ok = upper && lower && sol.violations.empty();
        os << "milp " << c.milp << " oracle " << c.oracle << " pla slack " << c.pla_slack << " grid slack "
           << c.grid_slack;
        for (const auto& v : sol.violations) os << "; " << v;
    }
    c.detail = os.str() + " | " + inst.describe();
    return c;
}

}  // namespace fortifynet::testing
