#include "fortifynet/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "fortifynet/error.hpp"

namespace fortifynet {

namespace {

std::string key_token(const std::string& id) {
    std::string out;
    for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') ? c : '_';
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "s" + out;
    return out;
}

std::string i2s(long long v) { return std::to_string(v); }

// Builds "base(a,b,...)" with an optional trailing scenario key.
std::string nm(const std::string& base, std::initializer_list<long long> args, const std::string& key) {
    std::string s = base;
    if (args.size() == 0 && key.empty()) return s;
    s += '(';
    bool first = true;
    for (long long a : args) {
        if (!first) s += ',';
        s += i2s(a);
        first = false;
    }
    if (!key.empty()) {
        if (!first) s += ',';
        s += key;
    }
    s += ')';
    return s;
}

double coef_for(const Link& l, const BprParams& bpr, double rate) {
    return bpr.alpha * l.free_flow_time / std::pow(1.0 - rate, bpr.beta);
}

void check_input(const ModelInput& in, ModelKind kind) {
    check_bpr(in.options.bpr);
    check_weights(in.weights);
    if (in.options.pla_segments < 1) throw ValidationError("PLA needs at least one segment");
    for (const auto& e : in.demand.entries()) {
        const OdRoutes* r = in.routes.find(e.origin, e.destination);
        if (!r || r->routes.empty())
            throw ValidationError("OD pair (" + i2s(e.origin) + "," + i2s(e.destination) + ") has no route");
    }
    if (kind == ModelKind::Baseline) return;
    if (!in.scenarios || in.scenarios->scenarios.empty()) throw ValidationError("stochastic models need scenarios");
    if (!in.fort) throw ValidationError("stochastic models need fortification parameters");
    validate_scenarios(*in.scenarios, &in.net);
    if (std::abs(in.scenarios->probability_sum() - 1.0) > 1e-9)
        throw ValidationError("scenario probabilities are not normalized");
    check_fortification(in.net, *in.fort);
    if (kind == ModelKind::RiskAverse || kind == ModelKind::Hybrid) {
        if (!(in.risk.epsilon > 0 && in.risk.epsilon <= 1)) throw ValidationError("epsilon must lie in (0,1]");
        if (!(in.risk.delta >= 0 && in.risk.delta <= 1)) throw ValidationError("delta must lie in [0,1]");
    }
}

BuiltModel build_core(const ModelInput& in, ModelKind kind) {
    check_input(in, kind);
    const Network& net = in.net;
    const auto& bpr = in.options.bpr;
    const ObjectiveWeights& w = in.weights;
    BuiltModel b;
    b.kind = kind;
    b.weights = w;
    b.risk = in.risk;
    b.bpr = bpr;
    MilpModel& m = b.model;

    const bool stochastic = kind != ModelKind::Baseline;
    if (stochastic) {
        for (const auto& s : in.scenarios->scenarios) {
            b.scenario_keys.push_back(key_token(s.id));
            b.probabilities.push_back(s.probability);
        }
        std::vector<std::string> sorted = b.scenario_keys;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("scenario ids collide after sanitizing");
    } else {
        b.scenario_keys = {""};
        b.probabilities = {1.0};
    }

    const auto upper = in.options.dominance_caps ? dominance_flow_caps(net, in.demand, in.routes, w, bpr)
                                                 : link_upper_bounds(net, in.demand, in.routes);
    std::map<int, double> err;
    for (const Link& l : net.links()) {
        auto g = build_grid(0.0, upper.at(l.id), in.options.pla_segments, bpr.beta, l.capacity);
        err[l.id] = pla_error_bound(g);
        b.grids.emplace(l.id, std::move(g));
    }

    std::map<NodeId, VarId> x;
    if (stochastic)
        for (NodeId n : net.nodes()) x[n] = m.add_variable(nm("x", {n}, ""), VarKind::Binary);

    LinearExpr objective;
    const double cz = w.w1 / w.z_normalizer;
    const double cu = w.w2 / w.demand_normalizer;
    std::optional<VarId> v;
    if (kind == ModelKind::RiskAverse || kind == ModelKind::Hybrid) v = m.add_variable("v", VarKind::Continuous, 0.0);

    for (std::size_t si = 0; si < b.scenario_keys.size(); ++si) {
        const std::string& key = b.scenario_keys[si];
        const Scenario* sc = stochastic ? &in.scenarios->scenarios[si] : nullptr;
        std::unordered_map<int, VarId> h, t, wv;
        std::vector<LinkScenario> states;
        std::map<int, double> max_coef;

        for (const Link& l : net.links()) {
            const double U = upper.at(l.id);
            h[l.id] = m.add_variable(nm("h", {l.id}, key), VarKind::Continuous, 0.0, U);
            t[l.id] = m.add_variable(nm("t", {l.id}, key), VarKind::Continuous, l.free_flow_time);
            wv[l.id] = m.add_variable(nm("w", {l.id}, key), VarKind::Continuous, 0.0);
            const std::string prefix = key.empty() ? i2s(l.id) : i2s(l.id) + "," + key;
            m.add_fragment(pla_fragment(b.grids.at(l.id), prefix, m.variables()[h[l.id]].name,
                                        m.variables()[wv[l.id]].name, in.options.encoding));

            LinkScenario ls{l.id, {}};
            if (sc)
                for (NodeId end : {l.tail, l.head}) {
                    auto it = sc->affected.find(end);
                    if (it == sc->affected.end()) continue;
                    const double rate = it->second;
                    ls.states.push_back({end, (1.0 - sc->mitigation(l.id)) * rate, rate});
                }
            const double bN = b.grids.at(l.id).b.back();
            if (ls.states.empty()) {
                LinearExpr e;
                e.add(t[l.id], 1.0).add(wv[l.id], -coef_for(l, bpr, 0.0));
                m.add_constraint(nm("bpr", {l.id}, key), e, Sense::GreaterEqual, l.free_flow_time);
                max_coef[l.id] = coef_for(l, bpr, 0.0);
            } else {
                double mc = 0.0;
                for (const auto& st : ls.states) {
                    const double thr = in.options.closure_threshold;
                    const bool closed_f = st.rate_fortified >= thr, closed_u = st.rate_unfortified >= thr;
                    double open_rate = -1.0;
                    if (!closed_f) open_rate = std::max(open_rate, st.rate_fortified);
                    if (!closed_u) open_rate = std::max(open_rate, st.rate_unfortified);
                    const double M =
                        in.options.global_big_m ? *in.options.global_big_m : coef_for(l, bpr, std::max(open_rate, 0.0)) * bN;
                    const VarId xi = x.at(st.node);
                    if (!closed_f) {
                        const double c = coef_for(l, bpr, st.rate_fortified);
                        LinearExpr e;
                        e.add(t[l.id], 1.0).add(wv[l.id], -c).add(xi, -M);
                        m.add_constraint(nm("fort", {l.id, st.node}, key), e, Sense::GreaterEqual, l.free_flow_time - M);
                        mc = std::max(mc, c);
                    } else {
                        LinearExpr e;
                        e.add(h[l.id], 1.0).add(xi, U);
                        m.add_constraint(nm("capf", {l.id, st.node}, key), e, Sense::LessEqual, U);
                    }
                    if (!closed_u) {
                        const double c = coef_for(l, bpr, st.rate_unfortified);
                        LinearExpr e;
                        e.add(t[l.id], 1.0).add(wv[l.id], -c).add(xi, M);
                        m.add_constraint(nm("unf", {l.id, st.node}, key), e, Sense::GreaterEqual, l.free_flow_time);
                        mc = std::max(mc, c);
                    } else {
                        LinearExpr e;
                        e.add(h[l.id], 1.0).add(xi, -U);
                        m.add_constraint(nm("capu", {l.id, st.node}, key), e, Sense::LessEqual, 0.0);
                    }
                    if (closed_f || closed_u)
                        b.warnings.push_back("scenario " + (sc ? sc->id : std::string()) + ": link " + i2s(l.id) +
                                             " treated as closed when node " + i2s(st.node) +
                                             (closed_f ? " is fortified or not" : " is not fortified"));
                }
                max_coef[l.id] = mc;
            }
            states.push_back(std::move(ls));
        }
        b.link_states.push_back(std::move(states));

        const VarId z = m.add_variable(key.empty() ? "z" : "z(" + key + ")", VarKind::Continuous, 0.0);
        std::map<int, LinearExpr> link_sum;
        LinearExpr undelivered;
        for (const auto& e : in.demand.entries()) {
            const OdRoutes* odr = in.routes.find(e.origin, e.destination);
            const VarId u = m.add_variable(nm("u", {e.origin, e.destination}, key), VarKind::Continuous, 0.0, e.effective);
            undelivered.add(u, 1.0);
            LinearExpr dem;
            dem.add(u, 1.0);
            for (std::size_t r = 0; r < odr->routes.size(); ++r) {
                const long long ri = static_cast<long long>(r) + 1;
                const VarId f = m.add_variable(nm("f", {e.origin, e.destination, ri}, key), VarKind::Continuous, 0.0);
                const VarId rt = m.add_variable(nm("rt", {e.origin, e.destination, ri}, key), VarKind::Continuous, 0.0);
                dem.add(f, 1.0);
                LinearExpr rte;
                rte.add(rt, 1.0);
                double err_sum = 0.0;
                for (int lid : odr->routes[r].links) {
                    link_sum[lid].add(f, 1.0);
                    rte.add(t.at(lid), -1.0);
                    err_sum += max_coef.at(lid) * err.at(lid);
                }
                b.route_time_error_bound = std::max(b.route_time_error_bound, err_sum);
                m.add_constraint(nm("rtime", {e.origin, e.destination, ri}, key), rte, Sense::Equal, 0.0);
                LinearExpr zr;
                zr.add(z, 1.0).add(rt, -1.0);
                m.add_constraint(nm("zmax", {e.origin, e.destination, ri}, key), zr, Sense::GreaterEqual, 0.0);
            }
            m.add_constraint(nm("dem", {e.origin, e.destination}, key), dem, Sense::Equal, e.effective);
        }
        for (const Link& l : net.links()) {
            LinearExpr fl;
            fl.add(h.at(l.id), 1.0);
            auto it = link_sum.find(l.id);
            if (it != link_sum.end()) fl.add(it->second, -1.0);
            m.add_constraint(nm("flow", {l.id}, key), fl, Sense::Equal, 0.0);
        }

        LinearExpr scost;
        scost.add(z, cz).add(undelivered, cu);
        const double p = b.probabilities[si];
        switch (kind) {
            case ModelKind::Baseline:
            case ModelKind::RiskNeutral: objective.add(scost, p); break;
            case ModelKind::RiskAverse:
            case ModelKind::Hybrid: {
                const VarId tau = m.add_variable("tau(" + key + ")", VarKind::Continuous, 0.0);
                LinearExpr row;
                row.add(tau, 1.0).add(*v, 1.0).add(scost, -1.0);
                m.add_constraint("cvar(" + key + ")", row, Sense::GreaterEqual, 0.0);
                const double tail = p / in.risk.epsilon;
                if (kind == ModelKind::RiskAverse) {
                    objective.add(tau, tail);
                } else {
                    objective.add(scost, (1.0 - in.risk.delta) * p);
                    objective.add(tau, in.risk.delta * tail);
                }
                break;
            }
        }
    }

    if (stochastic) {
        LinearExpr budget;
        for (auto [n, var] : x) {
            budget.add(var, 1.0);
            objective.add(var, w.w3 * in.fort->cost.at(n) / w.cost_normalizer);
        }
        m.add_constraint("budget", budget, Sense::LessEqual, in.fort->budget);
    }
    if (kind == ModelKind::RiskAverse) objective.add(*v, 1.0);
    if (kind == ModelKind::Hybrid) objective.add(*v, in.risk.delta);
    m.set_objective(objective);
    return b;
}

}  // namespace

std::string model_name(ModelKind k) {
    switch (k) {
        case ModelKind::Baseline: return "baseline";
        case ModelKind::RiskNeutral: return "rn";
        case ModelKind::RiskAverse: return "ra";
        case ModelKind::Hybrid: return "rnra";
    }
    return {};
}

std::optional<ModelKind> parse_model(const std::string& s) {
    for (auto k : {ModelKind::Baseline, ModelKind::RiskNeutral, ModelKind::RiskAverse, ModelKind::Hybrid})
        if (model_name(k) == s) return k;
    return std::nullopt;
}

void check_weights(const ObjectiveWeights& w) {
    if (w.w1 < 0 || w.w2 < 0 || w.w3 < 0) throw ValidationError("objective weights must be nonnegative");
    if (!(w.w1 + w.w2 + w.w3 > 0)) throw ValidationError("objective weights must not all be zero");
    if (!(w.z_normalizer > 0 && w.demand_normalizer > 0 && w.cost_normalizer > 0))
        throw ValidationError("objective normalizers must be positive");
}

std::map<int, double> link_upper_bounds(const Network& net, const DemandTable& demand, const RouteSet& routes) {
    std::map<int, double> used;
    for (const auto& e : demand.entries()) {
        const OdRoutes* r = routes.find(e.origin, e.destination);
        if (!r) continue;
        std::set<int> links;
        for (const auto& p : r->routes) links.insert(p.links.begin(), p.links.end());
        for (int l : links) used[l] += e.effective;
    }
    std::map<int, double> out;
    for (const Link& l : net.links()) out[l.id] = std::max(l.capacity, used.count(l.id) ? used[l.id] : 0.0);
    return out;
}

double max_free_flow_route_time(const Network& net, const RouteSet& routes) {
    double mx = 0;
    for (const auto& p : routes.pairs())
        for (const auto& r : p.routes) {
            double s = 0;
            for (int l : r.links) s += net.link(l).free_flow_time;
            mx = std::max(mx, s);
        }
    return mx;
}

std::map<int, double> dominance_flow_caps(const Network& net, const DemandTable& demand, const RouteSet& routes,
                                          const ObjectiveWeights& w, const BprParams& bpr) {
    auto out = link_upper_bounds(net, demand, routes);
    if (!(w.w1 > 0)) return out;
    const double zbar =
        max_free_flow_route_time(net, routes) + (w.w2 / w.w1) * w.z_normalizer * demand.total() / w.demand_normalizer;
    std::set<int> routed;
    for (const auto& p : routes.pairs())
        for (const auto& r : p.routes) routed.insert(r.links.begin(), r.links.end());
    for (int lid : routed) {
        const Link& l = net.link(lid);
        if (!(l.free_flow_time > 0) || !(bpr.alpha > 0)) continue;
        const double ratio = std::max(zbar - l.free_flow_time, 0.0) / (bpr.alpha * l.free_flow_time);
        const double cap = std::max(l.capacity * std::pow(ratio, 1.0 / bpr.beta), 1e-3 * l.capacity);
        out[lid] = std::min(out[lid], cap);
    }
    return out;
}

BuiltModel build_baseline(const ModelInput& in) { return build_core(in, ModelKind::Baseline); }
BuiltModel build_rn(const ModelInput& in) { return build_core(in, ModelKind::RiskNeutral); }
BuiltModel build_ra(const ModelInput& in) { return build_core(in, ModelKind::RiskAverse); }
BuiltModel build_rnra(const ModelInput& in) { return build_core(in, ModelKind::Hybrid); }
BuiltModel build_model(ModelKind kind, const ModelInput& in) { return build_core(in, kind); }

std::pair<std::string, std::vector<std::string>> split_var_name(const std::string& name) {
    const auto open = name.find('(');
    if (open == std::string::npos) return {name, {}};
    if (name.back() != ')') throw ParseError("malformed variable name '" + name + "'", 0);
    std::vector<std::string> args;
    std::string cur;
    for (std::size_t i = open + 1; i + 1 < name.size(); ++i) {
        if (name[i] == ',') {
            args.push_back(cur);
            cur.clear();
        } else {
            cur += name[i];
        }
    }
    args.push_back(cur);
    return {name.substr(0, open), args};
}

double cvar_by_sorting(const std::vector<double>& costs, const std::vector<double>& probs, double epsilon) {
    if (costs.size() != probs.size()) throw ValidationError("cost and probability vectors differ in length");
    if (!(epsilon > 0 && epsilon <= 1)) throw ValidationError("epsilon must lie in (0,1]");
    std::vector<std::size_t> idx(costs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return costs[a] > costs[b]; });
    double mass = 0, sum = 0;
    for (auto i : idx) {
        const double take = std::min(probs[i], epsilon - mass);
        if (take <= 0) break;
        sum += take * costs[i];
        mass += take;
    }
    return sum / epsilon;
}

Solution extract_solution(const BuiltModel& built, const RawSolution& raw, const ModelInput& in) {
    Solution sol;
    sol.status = raw.status;
    sol.objective = raw.objective;
    sol.gap = raw.gap;
    if (raw.status != SolveStatus::Optimal && raw.status != SolveStatus::Feasible) return sol;

    const MilpModel& m = built.model;
    std::vector<double> vals(m.variables().size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        auto it = raw.values.find(m.variables()[i].name);
        if (it == raw.values.end()) throw Error("solution lacks a value for '" + m.variables()[i].name + "'");
        vals[i] = it->second;
    }
    sol.objective_recomputed = m.objective_value(vals);

    const bool stochastic = built.kind != ModelKind::Baseline;
    std::map<std::string, std::size_t> key_index;
    for (std::size_t i = 0; i < built.scenario_keys.size(); ++i) key_index[built.scenario_keys[i]] = i;
    sol.scenarios.resize(built.scenario_keys.size());
    for (std::size_t i = 0; i < sol.scenarios.size(); ++i) {
        sol.scenarios[i].id = stochastic ? in.scenarios->scenarios[i].id : "baseline";
        sol.scenarios[i].probability = built.probabilities[i];
    }

    auto to_i = [](const std::string& s) { return std::stoi(s); };
    auto scen = [&](const std::vector<std::string>& args, std::size_t n_fixed) -> ScenarioResult& {
        if (!stochastic) return sol.scenarios[0];
        if (args.size() != n_fixed + 1) throw ParseError("unexpected argument count in solution name", 0);
        return sol.scenarios.at(key_index.at(args.back()));
    };
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const auto [base, args] = split_var_name(m.variables()[i].name);
        const double val = vals[i];
        if (base == "x") {
            if (val > 0.5) sol.fortified.insert(to_i(args[0]));
        } else if (base == "v") {
            sol.v = val;
        } else if (base == "tau") {
            sol.tau[args[0]] = val;
        } else if (base == "z") {
            scen(args, 0).z = val;
        } else if (base == "h") {
            scen(args, 1).link_flow[to_i(args[0])] = val;
        } else if (base == "t") {
            scen(args, 1).link_time[to_i(args[0])] = val;
        } else if (base == "u") {
            scen(args, 2).undelivered[{to_i(args[0]), to_i(args[1])}] = val;
        } else if (base == "f") {
            scen(args, 3).route_flow[{to_i(args[0]), to_i(args[1]), to_i(args[2])}] = val;
        } else if (base == "rt") {
            scen(args, 3).route_time[{to_i(args[0]), to_i(args[1]), to_i(args[2])}] = val;
        }
    }

    const double total_demand = in.demand.total();
    const auto& w = built.weights;
    auto tol = [](double mag) { return 1e-6 * std::max(1.0, std::abs(mag)); };
    for (std::size_t si = 0; si < sol.scenarios.size(); ++si) {
        ScenarioResult& r = sol.scenarios[si];
        const std::string label = "scenario " + r.id + ": ";
        std::map<int, double> agg;
        for (const auto& [k, f] : r.route_flow) {
            const auto& [o, d, idx] = k;
            for (int l : in.routes.find(o, d)->routes[idx - 1].links) agg[l] += f;
        }
        for (const auto& ls : built.link_states[si]) {
            const Link& l = in.net.link(ls.link);
            const double hv = r.link_flow[ls.link];
            if (std::abs(hv - agg[ls.link]) > tol(hv))
                sol.violations.push_back(label + "link " + std::to_string(ls.link) + " flow differs from route flows");
            double cap = l.capacity, coef = built.bpr.alpha * l.free_flow_time;
            bool closed = false;
            if (!ls.states.empty()) {
                coef = 0.0;
                for (const auto& st : ls.states) {
                    const double rate = sol.fortified.count(st.node) ? st.rate_fortified : st.rate_unfortified;
                    cap = std::min(cap, l.capacity * (1.0 - rate));
                    if (rate >= in.options.closure_threshold)
                        closed = true;
                    else
                        coef = std::max(coef, built.bpr.alpha * l.free_flow_time / std::pow(1.0 - rate, built.bpr.beta));
                }
            }
            r.residual_capacity[ls.link] = cap;
            if (hv > tol(0.0) && !closed) {
                const double exact = bpr_time(l.free_flow_time, built.bpr, hv, cap);
                if (r.link_time[ls.link] < exact - 1e-6 * std::max(1.0, exact))
                    sol.violations.push_back(label + "link " + std::to_string(ls.link) +
                                             " time below BPR at its effective capacity");
            }
            const double tm = closed ? l.free_flow_time : l.free_flow_time + coef * built.grids.at(ls.link).interpolate(hv);
            r.link_time_model[ls.link] = tm;
            r.total_travel_time += hv * tm;
        }
        for (const auto& e : in.demand.entries()) {
            const double u = r.undelivered[{e.origin, e.destination}];
            if (u < -tol(e.effective) || u > e.effective + tol(e.effective))
                sol.violations.push_back(label + "undelivered demand outside [0, d]");
            r.total_undelivered += u;
        }
        for (const auto& [k, tv] : r.route_time)
            if (r.z < tv - tol(tv)) sol.violations.push_back(label + "z below a route time");
        r.relative_undelivered = total_demand > 0 ? r.total_undelivered / total_demand : 0.0;
        r.cost = w.w1 * r.z / w.z_normalizer + w.w2 * r.total_undelivered / w.demand_normalizer;
    }
    if (stochastic && static_cast<int>(sol.fortified.size()) > in.fort->budget)
        sol.violations.push_back("fortified set exceeds the budget");
    return sol;
}

}  // namespace fortifynet
