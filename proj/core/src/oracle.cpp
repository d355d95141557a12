#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "fortifynet/error.hpp"
#include "fortifynet/solver_bridge.hpp"

namespace fortifynet {

namespace {

// All ways to place up to `units` grid units on `routes` routes.
void compositions(int units, int routes, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == routes) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= units; ++k) {
        cur.push_back(k);
        compositions(units - k, routes, cur, out);
        cur.pop_back();
    }
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct LinkState {
    double t0 = 0, cap = 0;
    bool closed = false;
};

}  // namespace

OracleResult oracle_solve(ModelKind kind, const ModelInput& in, double flow_grid, double max_combinations) {
    if (!(flow_grid > 0)) throw ValidationError("flow grid must be positive");
    const bool stochastic = kind != ModelKind::Baseline;
    if (stochastic && (!in.scenarios || !in.fort)) throw ValidationError("stochastic oracle needs scenarios and fortification");
    const auto& w = in.weights;
    const auto& bpr = in.options.bpr;
    const Network& net = in.net;

    struct Od {
        double demand;
        std::vector<std::vector<int>> route_links;  // link positions
        std::vector<std::vector<int>> options;
    };
    std::map<int, int> link_pos;
    for (std::size_t i = 0; i < net.links().size(); ++i) link_pos[net.links()[i].id] = static_cast<int>(i);
    std::vector<Od> ods;
    double combos = 1.0;
    for (const auto& e : in.demand.entries()) {
        const OdRoutes* r = in.routes.find(e.origin, e.destination);
        if (!r || r->routes.empty()) throw ValidationError("OD pair without routes");
        Od od;
        od.demand = e.effective;
        for (const auto& p : r->routes) {
            std::vector<int> pos;
            for (int l : p.links) pos.push_back(link_pos.at(l));
            od.route_links.push_back(std::move(pos));
        }
        const int units = static_cast<int>(std::floor(e.effective / flow_grid + 1e-9));
        const int R = static_cast<int>(od.route_links.size());
        combos *= binom(units + R, R);
        if (combos > max_combinations) throw ValidationError("oracle search space too large");
        std::vector<int> cur;
        compositions(units, R, cur, od.options);
        ods.push_back(std::move(od));
    }

    std::vector<NodeId> nodes = net.nodes();
    const std::size_t n_links = net.links().size();
    const std::size_t n_scen = stochastic ? in.scenarios->scenarios.size() : 1;

    // Minimum scenario cost for a fixed set of link states.
    auto best_cost = [&](const std::vector<LinkState>& ls) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> h(n_links, 0.0);
        std::vector<std::size_t> choice(ods.size(), 0);
        std::function<void(std::size_t, double)> rec = [&](std::size_t k, double undelivered) {
            if (k == ods.size()) {
                std::vector<double> t(n_links);
                for (std::size_t i = 0; i < n_links; ++i) {
                    if (ls[i].closed) {
                        if (h[i] > 0) return;
                        t[i] = ls[i].t0;
                    } else {
                        t[i] = ls[i].t0 * (1.0 + bpr.alpha * std::pow(h[i] / ls[i].cap, bpr.beta));
                    }
                }
                double z = 0.0;
                for (const auto& od : ods)
                    for (const auto& r : od.route_links) {
                        double s = 0;
                        for (int p : r) s += t[p];
                        z = std::max(z, s);
                    }
                best = std::min(best, w.w1 * z / w.z_normalizer + w.w2 * undelivered / w.demand_normalizer);
                return;
            }
            const Od& od = ods[k];
            for (const auto& opt : od.options) {
                double sent = 0;
                for (std::size_t r = 0; r < opt.size(); ++r) {
                    const double f = opt[r] * flow_grid;
                    sent += f;
                    for (int p : od.route_links[r]) h[p] += f;
                }
                rec(k + 1, undelivered + od.demand - sent);
                for (std::size_t r = 0; r < opt.size(); ++r)
                    for (int p : od.route_links[r]) h[p] -= opt[r] * flow_grid;
            }
        };
        rec(0, 0.0);
        return best;
    };

    auto states_for = [&](std::size_t si, const std::set<NodeId>& plan) {
        std::vector<LinkState> ls(n_links);
        for (std::size_t i = 0; i < n_links; ++i) {
            const Link& l = net.links()[i];
            ls[i].t0 = l.free_flow_time;
            ls[i].cap = l.capacity;
            if (!stochastic) continue;
            const Scenario& sc = in.scenarios->scenarios[si];
            for (NodeId end : {l.tail, l.head}) {
                auto it = sc.affected.find(end);
                if (it == sc.affected.end()) continue;
                const double rate = plan.count(end) ? (1.0 - sc.mitigation(l.id)) * it->second : it->second;
                if (rate >= in.options.closure_threshold)
                    ls[i].closed = true;
                else
                    ls[i].cap = std::min(ls[i].cap, l.capacity * (1.0 - rate));
            }
        }
        return ls;
    };

    OracleResult best;
    best.objective = std::numeric_limits<double>::infinity();
    const int budget = stochastic ? std::min<int>(in.fort->budget, static_cast<int>(nodes.size())) : 0;

    std::set<NodeId> plan;
    std::function<void(std::size_t)> plans = [&](std::size_t from) {
        std::vector<double> costs(n_scen), probs(n_scen);
        for (std::size_t si = 0; si < n_scen; ++si) {
            costs[si] = best_cost(states_for(si, plan));
            probs[si] = stochastic ? in.scenarios->scenarios[si].probability : 1.0;
        }
        double fcost = 0;
        if (stochastic)
            for (NodeId n : plan) fcost += w.w3 * in.fort->cost.at(n) / w.cost_normalizer;
        double expected = 0;
        for (std::size_t si = 0; si < n_scen; ++si) expected += probs[si] * costs[si];
        double obj = expected;
        if (kind == ModelKind::RiskAverse) obj = cvar_by_sorting(costs, probs, in.risk.epsilon);
        if (kind == ModelKind::Hybrid)
            obj = (1.0 - in.risk.delta) * expected + in.risk.delta * cvar_by_sorting(costs, probs, in.risk.epsilon);
        obj += fcost;
        if (obj < best.objective) {
            best.objective = obj;
            best.fortified = plan;
            best.scenario_costs = costs;
        }
        if (static_cast<int>(plan.size()) == budget) return;
        for (std::size_t i = from; i < nodes.size(); ++i) {
            plan.insert(nodes[i]);
            plans(i + 1);
            plan.erase(nodes[i]);
        }
    };
    plans(0);
    return best;
}

}  // namespace fortifynet
